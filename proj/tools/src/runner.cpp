#include "pco_cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "pco/error.hpp"

namespace pco::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Slack on the critical reset curve when judging simulated clusters.
constexpr double kTheoryMargin = 0.02;

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::string join_sizes(const std::vector<int>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? ";" : "") + std::to_string(sizes[i]);
  return out;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

constexpr const char* kRunHeader =
    "point,run,c,seed,status,events,time,periodic,period,max_cluster,sizes,theory_ok\n";

std::string format_row(const RunRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.point, r.run, num(r.c), r.seed,
                     csv_field(r.status), r.events, num(r.time), r.periodic ? 1 : 0,
                     r.period ? num(*r.period) : "", r.max_size(), join_sizes(r.sizes),
                     r.theory_ok ? (*r.theory_ok ? "1" : "0") : "");
}

// Critical reset curve for homogeneous U_b (b < 0) networks, indexed by a.
struct CriticalCurve {
  std::vector<double> c_cr;  // c_cr[a] for a = 2..n

  // Smallest a whose clusters are unstable at c; n when none is.
  int bound(double c, int n) const {
    for (int a = 2; a <= n; ++a) {
      if (c_cr[static_cast<std::size_t>(a)] < c) return a;
    }
    return n;
  }
};

std::optional<CriticalCurve> critical_curve(const ExperimentConfig& cfg) {
  if (cfg.rise.family != "ub" || !(cfg.rise.b < 0.0) || cfg.n < 2 ||
      cfg.coupling.kind != CouplingSpec::Kind::Homogeneous || !(cfg.coupling.eps > 0.0)) {
    return std::nullopt;
  }
  CriticalCurve curve;
  curve.c_cr.assign(static_cast<std::size_t>(cfg.n) + 1, 0.0);
  for (const BifurcationPoint& p : bifurcation_curve(cfg.n, cfg.coupling.eps, cfg.rise.b)) {
    curve.c_cr[static_cast<std::size_t>(p.a)] = p.c_cr;
  }
  return curve;
}

// A periodic cluster of size a must not survive beyond c_cr(a); perturbed
// synchrony must not break up below c_cr(n).
bool consistent(const CriticalCurve& curve, const ExperimentConfig& cfg, const RunRow& r) {
  const int a = r.max_size();
  if (r.periodic && a >= 2 && r.c > curve.c_cr[static_cast<std::size_t>(a)] + kTheoryMargin) {
    return false;
  }
  if (cfg.initial.kind == InitialSpec::Kind::PerturbedSync &&
      r.c < curve.c_cr[static_cast<std::size_t>(cfg.n)] - kTheoryMargin && a < cfg.n) {
    return false;
  }
  return true;
}

struct Context {
  const ExperimentConfig& cfg;
  RiseFunction u;
  CouplingMatrix coupling;
  std::optional<CriticalCurve> curve;
};

Context make_context(const ExperimentConfig& cfg) {
  const std::uint64_t base = cfg.seed.value_or(0);
  return Context{cfg, build_rise(cfg.rise), build_coupling(cfg, child_seed(base, kCouplingStream, 0)),
                 critical_curve(cfg)};
}

struct RunOutput {
  RunRow row;
  SimulationResult sim;
  ClusterPartition partition;
};

RunOutput simulate_run(const Context& ctx, const PartialReset& reset, double c, std::uint64_t seed) {
  const ExperimentConfig& cfg = ctx.cfg;
  RunOutput out;
  out.row.c = c;
  out.row.seed = seed;
  SimulationOptions opt;
  opt.max_events = cfg.duration.max_events;
  opt.max_time = cfg.duration.max_time;
  opt.stop_when_periodic = cfg.duration.stop_when_periodic;
  opt.extra_periods = cfg.duration.extra_periods;
  opt.periodic_tolerance = cfg.detect.tolerance;
  opt.periodic_window = cfg.detect.window;
  out.sim = simulate(initial_state(cfg, seed), ctx.coupling, reset, ctx.u, opt);
  out.partition = detect_clusters(out.sim.log, cfg.detect.window, cfg.detect.tolerance);
  out.row.events = out.sim.events;
  out.row.time = out.sim.time;
  out.row.periodic = out.partition.periodic;
  out.row.period = out.partition.period;
  out.row.sizes = out.partition.sizes;
  if (ctx.curve) out.row.theory_ok = consistent(*ctx.curve, cfg, out.row);
  return out;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t run) {
  return splitmix64(splitmix64(splitmix64(seed) ^ point) ^ run);
}

NetworkState initial_state(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(cfg.n);
  std::vector<double> phases(n, 1.0);
  std::mt19937_64 rng(seed);
  switch (cfg.initial.kind) {
    case InitialSpec::Kind::PerturbedSync: {
      std::uniform_real_distribution<double> noise(0.0, cfg.initial.magnitude);
      if (cfg.initial.magnitude > 0.0) {
        for (double& p : phases) p = 1.0 - noise(rng);
      }
      break;
    }
    case InitialSpec::Kind::UniformRandom: {
      std::uniform_real_distribution<double> draw(0.0, 1.0);
      for (double& p : phases) p = draw(rng);
      break;
    }
    case InitialSpec::Kind::Phases:
      phases = cfg.initial.phases;
      break;
  }
  NetworkState state = make_state(phases);
  advance_to_section(state);
  return state;
}

SingleResult run_single(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const Context ctx = make_context(cfg);
  const double c = cfg.reset.kind == ResetSpec::Kind::Linear ? cfg.reset.c : 0.0;
  RunOutput run = simulate_run(ctx, build_reset(cfg.reset), c, child_seed(cfg.seed.value_or(0), 0, 0));

  if (cfg.output.event_log) {
    std::ofstream events = open_out(out_dir, "events.jsonl");
    write_jsonl(events, run.sim.log);
  }
  if (cfg.output.snapshots) {
    std::ofstream snaps = open_out(out_dir, "snapshots.csv");
    snaps << "t,event_index,phases,perm\n";
    for (const SectionSnapshot& s : run.sim.log.snapshots) {
      std::string ph;
      std::string perm;
      for (std::size_t k = 0; k < s.phases.size(); ++k) {
        ph += (k ? ";" : "") + num(s.phases[k]);
        perm += (k ? ";" : "") + std::to_string(s.perm[k]);
      }
      snaps << num(s.t) << ',' << s.event_index << ',' << ph << ',' << perm << '\n';
    }
  }
  std::ofstream summary = open_out(out_dir, "summary.csv");
  summary << kRunHeader << format_row(run.row);
  return SingleResult{run.row, std::move(run.sim.log), run.partition};
}

std::vector<PointSummary> summarize(const ExperimentConfig& cfg, const std::vector<RunRow>& rows) {
  const std::optional<CriticalCurve> curve = critical_curve(cfg);
  std::vector<PointSummary> points;
  for (const RunRow& r : rows) {
    if (points.empty() || points.back().point != r.point) {
      PointSummary p;
      p.point = r.point;
      p.c = r.c;
      p.max_cluster_min = std::numeric_limits<int>::max();
      if (curve) p.theory_bound = curve->bound(r.c, cfg.n);
      points.push_back(p);
    }
    PointSummary& p = points.back();
    ++p.runs;
    if (r.status != "ok") {
      ++p.failures;
      continue;
    }
    p.max_cluster_min = std::min(p.max_cluster_min, r.max_size());
    p.max_cluster_max = std::max(p.max_cluster_max, r.max_size());
    p.max_cluster_mean += r.max_size();
    p.periodic_runs += r.periodic ? 1 : 0;
    p.theory_violations += (r.theory_ok && !*r.theory_ok) ? 1 : 0;
  }
  for (PointSummary& p : points) {
    const std::size_t ok = p.runs - p.failures;
    if (ok == 0) p.max_cluster_min = 0;
    p.max_cluster_mean = ok ? p.max_cluster_mean / static_cast<double>(ok) : 0.0;
  }
  return points;
}

SweepSummary run_sweep(const ExperimentConfig& cfg, const fs::path& out_dir, unsigned workers) {
  if (!cfg.sweep) throw ConfigError("sweep", "missing");
  const SweepSpec& sweep = *cfg.sweep;
  const Context ctx = make_context(cfg);
  const std::uint64_t base = cfg.seed.value_or(0);
  const std::size_t runs = sweep.runs_per_point;
  const std::size_t total = sweep.c.size() * runs;

  auto task = [&](std::size_t k) {
    RunRow row;
    row.point = k / runs;
    row.run = k % runs;
    row.c = sweep.c[row.point];
    row.seed = child_seed(base, row.point, row.run);
    try {
      RunOutput out = simulate_run(ctx, build_reset(cfg.reset, row.c), row.c, row.seed);
      out.row.point = row.point;
      out.row.run = row.run;
      return out.row;
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
      return row;
    }
  };

  std::ofstream rows_out = open_out(out_dir, "sweep_runs.csv");
  rows_out << kRunHeader << std::flush;

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));

  std::vector<std::optional<RunRow>> slots(total);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < total; k = next++) {
        RunRow row = task(k);
        {
          std::lock_guard<std::mutex> lock(mutex);
          slots[k] = std::move(row);
        }
        ready.notify_all();
      }
    });
  }

  SweepSummary summary;
  summary.rows.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::unique_lock<std::mutex> lock(mutex);
    ready.wait(lock, [&] { return slots[k].has_value(); });
    RunRow row = std::move(*slots[k]);
    slots[k].reset();
    lock.unlock();
    rows_out << format_row(row) << std::flush;
    summary.rows.push_back(std::move(row));
  }
  for (std::thread& t : pool) t.join();

  summary.points = summarize(cfg, summary.rows);
  std::ofstream points_out = open_out(out_dir, "sweep_points.csv");
  points_out << "point,c,runs,failures,max_cluster_min,max_cluster_max,max_cluster_mean,"
                "periodic_runs,theory_bound,theory_violations\n";
  for (const PointSummary& p : summary.points) {
    points_out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", p.point, num(p.c), p.runs,
                              p.failures, p.max_cluster_min, p.max_cluster_max,
                              num(p.max_cluster_mean), p.periodic_runs,
                              p.theory_bound ? std::to_string(*p.theory_bound) : "",
                              p.theory_violations);
  }
  return summary;
}

TheoryResult run_theory(const ExperimentConfig& cfg, const fs::path& out_dir) {
  if (cfg.coupling.kind != CouplingSpec::Kind::Homogeneous) {
    throw ConfigError("coupling.kind", "theory needs homogeneous coupling");
  }
  const int n = cfg.n;
  const double eps = cfg.coupling.eps;
  const int a_min = cfg.theory.a_min;
  const int a_max = cfg.theory.a_max == 0 ? n : cfg.theory.a_max;
  if (n < 2 || a_min > a_max) throw ConfigError("theory", "needs 2 <= a_min <= a_max <= n");
  const RiseFunction u = build_rise(cfg.rise);
  TheoryResult result;

  if (cfg.rise.family == "ub" && cfg.rise.b < 0.0 && eps > 0.0) {
    std::vector<BifurcationPoint> curve;
    for (const BifurcationPoint& p : bifurcation_curve(n, eps, cfg.rise.b)) {
      if (p.a >= a_min && p.a <= a_max) curve.push_back(p);
    }
    std::ofstream out = open_out(out_dir, "bifurcation.csv");
    out << "a,c_cr,method,residual\n";
    for (const BifurcationPoint& p : curve) {
      out << fmt::format("{},{},{},{}\n", p.a, num(p.c_cr), p.method, num(p.residual));
    }
    result.curve = std::move(curve);
  }

  try {
    result.shape = classify(u);
  } catch (const ClassificationConflict& e) {
    result.bounds_note = std::string("classification failed: ") + e.what();
  }
  if (result.shape && !result.shape->icpd && !result.shape->dcpd) {
    result.bounds_note = "rise function is neither icpd nor dcpd";
  }
  if (result.shape && result.bounds_note.empty()) {
    std::vector<ResetBounds> bounds;
    for (int a1 = a_min; a1 <= a_max; ++a1) {
      bounds.push_back(linear_reset_bounds(a1, n, eps, u, *result.shape));
    }
    std::ofstream out = open_out(out_dir, "cluster_bounds.csv");
    out << "a1,sufficient_c,necessary_c\n";
    for (const ResetBounds& b : bounds) {
      out << fmt::format("{},{},{}\n", b.a1, num(b.sufficient_c), num(b.necessary_c));
    }
    result.bounds = std::move(bounds);
  }
  return result;
}

json shape_to_json(const RiseFunction& u, const ShapeReport& r) {
  json j;
  j["rise"] = u.name();
  j["convex"] = r.convex;
  j["concave"] = r.concave;
  j["sigmoidal"] = r.sigmoidal;
  j["icpd"] = r.icpd;
  j["dcpd"] = r.dcpd;
  j["method"] = std::string(to_string(r.method));
  j["scan"] = {{"min_slope", r.scan.min_slope},
               {"max_slope", r.scan.max_slope},
               {"icpd", r.scan.icpd},
               {"dcpd", r.scan.dcpd}};
  j["nonlocal"] = {{"icpd_sufficient", r.nonlocal.icpd_sufficient},
                   {"dcpd_sufficient", r.nonlocal.dcpd_sufficient}};
  if (r.table) {
    auto cell = [](const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); };
    j["table"] = {{"concave", cell(r.table->concave)},
                  {"convex", cell(r.table->convex)},
                  {"sigmoidal", cell(r.table->sigmoidal)},
                  {"icpd", cell(r.table->icpd)},
                  {"dcpd", cell(r.table->dcpd)}};
  } else {
    j["table"] = nullptr;
  }
  j["table_overruled"] = r.table_overruled;
  return j;
}

json run_classify(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const RiseFunction u = build_rise(cfg.rise);
  const json j = shape_to_json(u, classify(u));
  std::ofstream out = open_out(out_dir, "shape.json");
  out << j.dump(2) << '\n';
  return j;
}

}  // namespace pco::cli
