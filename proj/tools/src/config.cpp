#include "pco_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "pco/error.hpp"
#include "preset_data.hpp"

namespace pco::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

// Object view that remembers its path and rejects keys nobody asked for.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : value_.items()) {
      if (!allowed.count(key)) throw ConfigError(join(path_, key), "unknown key");
    }
  }

  bool has(const std::string& key) const { return value_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }
  const json& raw(const std::string& key) const { return value_.at(key); }

  Node child(const std::string& key) const {
    if (!has(key)) throw ConfigError(path(key), "missing");
    return Node(value_.at(key), path(key));
  }

  double number(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long long integer(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const long long v = integer(key);
    if (v < 0) throw ConfigError(path(key), "must be non-negative");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(index_path(path(key), i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) throw ConfigError(index_path(path(key), i), "expected an integer");
      out.push_back(v[i].get<int>());
    }
    return out;
  }

 private:
  const json& require(const std::string& key) const {
    if (!has(key)) throw ConfigError(path(key), "missing");
    return value_.at(key);
  }

  const json& value_;
  std::string path_;
};

void check(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

CouplingSpec parse_coupling(const Node& root, int n) {
  Node node = root.child("coupling");
  CouplingSpec spec;
  const std::string kind = node.string("kind");
  if (kind == "homogeneous") {
    node.allow({"kind", "eps"});
    spec.kind = CouplingSpec::Kind::Homogeneous;
    spec.eps = node.number("eps");
    check(spec.eps >= 0.0, node.path("eps"), "must be >= 0");
    check((n - 1) * spec.eps < 1.0, node.path("eps"), "(n - 1) eps must be < 1");
  } else if (kind == "random_uniform") {
    node.allow({"kind", "eps_min", "eps_max"});
    spec.kind = CouplingSpec::Kind::RandomUniform;
    spec.eps_min = node.number("eps_min");
    spec.eps_max = node.number("eps_max");
    check(spec.eps_min >= 0.0, node.path("eps_min"), "must be >= 0");
    check(spec.eps_max >= spec.eps_min, node.path("eps_max"), "must be >= eps_min");
    check((n - 1) * spec.eps_max < 1.0, node.path("eps_max"), "(n - 1) eps_max must be < 1");
  } else if (kind == "meta") {
    node.allow({"kind", "eps", "sizes"});
    spec.kind = CouplingSpec::Kind::Meta;
    spec.eps = node.number("eps");
    spec.sizes = node.integers("sizes");
    check(spec.eps >= 0.0, node.path("eps"), "must be >= 0");
    int total = 0;
    for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
      check(spec.sizes[i] >= 1, index_path(node.path("sizes"), i), "must be >= 1");
      total += spec.sizes[i];
    }
    check(spec.sizes.size() == static_cast<std::size_t>(n), node.path("sizes"),
          "needs one size per meta-oscillator (n = " + std::to_string(n) + ")");
    check((total - 1) * spec.eps < 1.0, node.path("eps"), "(sum(sizes) - 1) eps must be < 1");
  } else {
    throw ConfigError(node.path("kind"), "expected homogeneous, random_uniform or meta");
  }
  return spec;
}

RiseSpec parse_rise(const Node& root) {
  Node node = root.child("rise");
  RiseSpec spec;
  spec.family = node.string("family");
  const std::string& f = spec.family;
  if (f == "identity") {
    node.allow({"family"});
  } else if (f == "ub") {
    node.allow({"family", "b"});
    spec.b = node.number("b");
  } else if (f == "lif") {
    node.allow({"family", "e_eq", "g_l"});
    spec.e_eq = node.number("e_eq");
    spec.g_l = node.number("g_l", 1.0);
  } else if (f == "lif_cb") {
    node.allow({"family", "e_eq", "g_l", "e_syn"});
    spec.e_eq = node.number("e_eq");
    spec.g_l = node.number("g_l", 1.0);
    spec.e_syn = node.number("e_syn");
  } else if (f == "qif") {
    node.allow({"family", "alpha", "beta"});
    spec.alpha = node.number("alpha");
    spec.beta = node.number("beta");
  } else if (f == "qif_cb") {
    node.allow({"family", "alpha", "beta", "e_syn"});
    spec.alpha = node.number("alpha");
    spec.beta = node.number("beta");
    spec.e_syn = node.number("e_syn");
  } else {
    throw ConfigError(node.path("family"), "expected identity, ub, lif, lif_cb, qif or qif_cb");
  }
  try {
    (void)build_rise(spec);
  } catch (const ParameterError& e) {
    throw ConfigError(node.path("family"), e.what());
  }
  return spec;
}

ResetSpec parse_reset(const Node& root) {
  Node node = root.child("reset");
  ResetSpec spec;
  const std::string kind = node.string("kind");
  if (kind == "linear") {
    node.allow({"kind", "c"});
    spec.kind = ResetSpec::Kind::Linear;
    spec.c = node.number("c");
    check(spec.c >= 0.0, node.path("c"), "must be >= 0");
  } else if (kind == "table") {
    node.allow({"kind", "zeta", "value"});
    spec.kind = ResetSpec::Kind::Table;
    spec.zeta = node.numbers("zeta");
    spec.value = node.numbers("value");
    check(spec.zeta.size() >= 2, node.path("zeta"), "needs at least two points");
    check(spec.value.size() == spec.zeta.size(), node.path("value"), "must match zeta in length");
    check(spec.zeta[0] == 0.0, index_path(node.path("zeta"), 0), "must be 0");
    check(spec.value[0] == 0.0, index_path(node.path("value"), 0), "must be 0");
    for (std::size_t i = 1; i < spec.zeta.size(); ++i) {
      check(spec.zeta[i] > spec.zeta[i - 1], index_path(node.path("zeta"), i), "must be increasing");
      check(spec.value[i] >= spec.value[i - 1], index_path(node.path("value"), i),
            "must be non-decreasing");
    }
  } else {
    throw ConfigError(node.path("kind"), "expected linear or table");
  }
  return spec;
}

InitialSpec parse_initial(const Node& root, int n) {
  InitialSpec spec;
  if (!root.has("initial")) return spec;
  Node node = root.child("initial");
  const std::string kind = node.string("kind");
  if (kind == "perturbed_sync") {
    node.allow({"kind", "magnitude"});
    spec.kind = InitialSpec::Kind::PerturbedSync;
    spec.magnitude = node.number("magnitude", 1e-3);
    check(spec.magnitude >= 0.0 && spec.magnitude < 1.0, node.path("magnitude"), "must lie in [0, 1)");
  } else if (kind == "uniform_random") {
    node.allow({"kind"});
    spec.kind = InitialSpec::Kind::UniformRandom;
  } else if (kind == "phases") {
    node.allow({"kind", "phases"});
    spec.kind = InitialSpec::Kind::Phases;
    spec.phases = node.numbers("phases");
    check(spec.phases.size() == static_cast<std::size_t>(n), node.path("phases"),
          "needs exactly n = " + std::to_string(n) + " entries");
    for (std::size_t i = 0; i < spec.phases.size(); ++i) {
      check(spec.phases[i] >= 0.0 && spec.phases[i] <= 1.0, index_path(node.path("phases"), i),
            "must lie in [0, 1]");
    }
  } else {
    throw ConfigError(node.path("kind"), "expected perturbed_sync, uniform_random or phases");
  }
  return spec;
}

DurationSpec parse_duration(const Node& root) {
  DurationSpec spec;
  if (!root.has("duration")) return spec;
  Node node = root.child("duration");
  node.allow({"max_events", "max_time", "stop_when_periodic", "extra_periods"});
  spec.max_events = node.count("max_events", spec.max_events);
  spec.max_time = node.number("max_time", spec.max_time);
  spec.stop_when_periodic = node.boolean("stop_when_periodic", spec.stop_when_periodic);
  spec.extra_periods = node.count("extra_periods", spec.extra_periods);
  check(spec.max_events >= 1, node.path("max_events"), "must be >= 1");
  check(spec.max_time >= 0.0, node.path("max_time"), "must be >= 0");
  return spec;
}

DetectSpec parse_detect(const Node& root) {
  DetectSpec spec;
  if (!root.has("detect")) return spec;
  Node node = root.child("detect");
  node.allow({"tolerance", "window"});
  spec.tolerance = node.number("tolerance", spec.tolerance);
  spec.window = node.count("window", spec.window);
  check(spec.tolerance > 0.0, node.path("tolerance"), "must be > 0");
  return spec;
}

std::optional<SweepSpec> parse_sweep(const Node& root) {
  if (!root.has("sweep") || root.raw("sweep").is_null()) return std::nullopt;
  Node node = root.child("sweep");
  node.allow({"c", "runs_per_point"});
  SweepSpec spec;
  spec.runs_per_point = node.count("runs_per_point", 1);
  check(spec.runs_per_point >= 1, node.path("runs_per_point"), "must be >= 1");
  const std::string cpath = node.path("c");
  if (!node.has("c")) throw ConfigError(cpath, "missing");
  if (node.raw("c").is_array()) {
    spec.c = node.numbers("c");
  } else {
    Node grid = node.child("c");
    grid.allow({"start", "stop", "num"});
    const double start = grid.number("start");
    const double stop = grid.number("stop");
    const long long num = grid.integer("num");
    check(num >= 1, grid.path("num"), "must be >= 1");
    for (long long k = 0; k < num; ++k) {
      spec.c.push_back(num == 1 ? start : start + (stop - start) * static_cast<double>(k) /
                                                      static_cast<double>(num - 1));
    }
  }
  check(!spec.c.empty(), cpath, "needs at least one value");
  for (std::size_t i = 0; i < spec.c.size(); ++i) {
    check(spec.c[i] >= 0.0, index_path(cpath, i), "must be >= 0");
  }
  return spec;
}

TheorySpec parse_theory(const Node& root, int n) {
  TheorySpec spec;
  if (!root.has("theory")) return spec;
  Node node = root.child("theory");
  node.allow({"a_min", "a_max"});
  spec.a_min = static_cast<int>(node.integer("a_min", 2));
  spec.a_max = static_cast<int>(node.integer("a_max", 0));
  check(spec.a_min >= 2, node.path("a_min"), "must be >= 2");
  check(spec.a_max == 0 || (spec.a_max >= spec.a_min && spec.a_max <= n), node.path("a_max"),
        "must be 0 or lie in [a_min, n]");
  return spec;
}

OutputSpec parse_output(const Node& root) {
  OutputSpec spec;
  if (!root.has("output")) return spec;
  Node node = root.child("output");
  node.allow({"event_log", "snapshots"});
  spec.event_log = node.boolean("event_log", spec.event_log);
  spec.snapshots = node.boolean("snapshots", spec.snapshots);
  return spec;
}

}  // namespace

bool ExperimentConfig::randomized() const {
  return coupling.kind == CouplingSpec::Kind::RandomUniform ||
         initial.kind == InitialSpec::Kind::UniformRandom ||
         (initial.kind == InitialSpec::Kind::PerturbedSync && initial.magnitude > 0.0);
}

ExperimentConfig parse_config(const json& doc) {
  Node root(doc, "");
  root.allow({"name", "n", "seed", "coupling", "rise", "reset", "initial", "duration", "detect",
              "sweep", "theory", "output"});
  ExperimentConfig cfg;
  cfg.name = root.string("name", cfg.name);
  const long long n = root.integer("n");
  check(n >= 1 && n <= 100000, "n", "must lie in [1, 100000]");
  cfg.n = static_cast<int>(n);
  if (root.has("seed") && !root.raw("seed").is_null()) {
    const json& s = root.raw("seed");
    check(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), "seed",
          "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.coupling = parse_coupling(root, cfg.n);
  cfg.rise = parse_rise(root);
  cfg.reset = parse_reset(root);
  cfg.initial = parse_initial(root, cfg.n);
  cfg.duration = parse_duration(root);
  cfg.detect = parse_detect(root);
  cfg.sweep = parse_sweep(root);
  cfg.theory = parse_theory(root, cfg.n);
  cfg.output = parse_output(root);
  if (cfg.sweep && cfg.reset.kind != ResetSpec::Kind::Linear) {
    throw ConfigError("sweep.c", "a c grid needs reset.kind = linear");
  }
  if (cfg.randomized() && !cfg.seed) {
    throw ConfigError("seed", "required because the configuration draws random numbers");
  }
  return cfg;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : detail::kPresets) names.emplace_back(p.name);
  return names;
}

json preset(const std::string& name) {
  for (const auto& p : detail::kPresets) {
    if (name == p.name) return json::parse(p.text);
  }
  std::string known;
  for (const auto& p : detail::kPresets) known += (known.empty() ? "" : ", ") + std::string(p.name);
  throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

json compose_config(const std::optional<std::string>& preset_name,
                    const std::optional<std::string>& file) {
  json doc = json::object();
  if (preset_name) doc = preset(*preset_name);
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("<file>", "cannot open " + *file);
    json patch;
    try {
      patch = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
      throw ConfigError("<file>", std::string("parse error: ") + e.what());
    }
    if (!patch.is_object()) throw ConfigError("<root>", "expected an object");
    doc.merge_patch(patch);
  }
  if (!preset_name && !file) throw ConfigError("<root>", "need a config file or --preset");
  return doc;
}

RiseFunction build_rise(const RiseSpec& spec) {
  const std::string& f = spec.family;
  if (f == "identity") return make_identity();
  if (f == "ub") return make_ub(spec.b);
  if (f == "lif") return make_lif(spec.e_eq, spec.g_l);
  if (f == "lif_cb") return to_conductance_based(make_lif(spec.e_eq, spec.g_l), spec.e_syn);
  if (f == "qif") return make_qif(spec.alpha, spec.beta);
  if (f == "qif_cb") return to_conductance_based(make_qif(spec.alpha, spec.beta), spec.e_syn);
  throw ConfigError("rise.family", "unknown family '" + f + "'");
}

PartialReset build_reset(const ResetSpec& spec) {
  if (spec.kind == ResetSpec::Kind::Linear) return PartialReset::linear(spec.c);
  const std::vector<double> zeta = spec.zeta;
  const std::vector<double> value = spec.value;
  auto segment = [zeta](double z) {
    const auto it = std::upper_bound(zeta.begin(), zeta.end(), z);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - zeta.begin(), 1)) - 1;
    return std::min(k, zeta.size() - 2);
  };
  auto slope = [zeta, value](std::size_t k) {
    return (value[k + 1] - value[k]) / (zeta[k + 1] - zeta[k]);
  };
  return PartialReset::custom(
      [=](double z) {
        const std::size_t k = segment(z);
        return value[k] + slope(k) * (z - zeta[k]);
      },
      [=](double z) { return slope(segment(z)); });
}

PartialReset build_reset(const ResetSpec& spec, double c) {
  if (spec.kind != ResetSpec::Kind::Linear) throw ConfigError("reset.kind", "expected linear");
  return PartialReset::linear(c);
}

CouplingMatrix build_coupling(const ExperimentConfig& config, std::uint64_t coupling_seed) {
  const auto n = static_cast<std::size_t>(config.n);
  switch (config.coupling.kind) {
    case CouplingSpec::Kind::Homogeneous:
      return CouplingMatrix::homogeneous(n, config.coupling.eps);
    case CouplingSpec::Kind::RandomUniform: {
      std::mt19937_64 rng(coupling_seed);
      return CouplingMatrix::random_uniform(n, config.coupling.eps_min, config.coupling.eps_max, rng);
    }
    case CouplingSpec::Kind::Meta:
      return CouplingMatrix::meta(config.coupling.sizes, config.coupling.eps);
  }
  throw ConfigError("coupling.kind", "unhandled kind");
}

}  // namespace pco::cli
