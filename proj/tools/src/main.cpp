#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pco/error.hpp"
#include "pco_cli/config.hpp"
#include "pco_cli/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNonConvergence = 3 };

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  unsigned workers = 0;
};

pco::cli::ExperimentConfig load(const Options& opt) {
  nlohmann::json doc = pco::cli::compose_config(opt.preset, opt.config);
  if (opt.seed) doc["seed"] = *opt.seed;
  return pco::cli::parse_config(doc);
}

int simulate(const Options& opt) {
  const auto cfg = load(opt);
  const auto result = pco::cli::run_single(cfg, opt.out_dir);
  const auto& r = result.row;
  fmt::print("{}: {} events, t = {:.17g}, periodic = {}, max cluster = {}\n", cfg.name, r.events,
             r.time, r.periodic, r.max_size());
  return kOk;
}

int sweep(const Options& opt) {
  const auto cfg = load(opt);
  const auto summary = pco::cli::run_sweep(cfg, opt.out_dir, opt.workers);
  std::size_t failures = 0;
  std::size_t violations = 0;
  for (const auto& p : summary.points) {
    failures += p.failures;
    violations += p.theory_violations;
    fmt::print("c = {:.4f}  max cluster {}..{}  periodic {}/{}\n", p.c, p.max_cluster_min,
               p.max_cluster_max, p.periodic_runs, p.runs);
  }
  fmt::print("{} runs, {} failed, {} theory violations\n", summary.rows.size(), failures, violations);
  return kOk;
}

int theory(const Options& opt) {
  const auto cfg = load(opt);
  const auto result = pco::cli::run_theory(cfg, opt.out_dir);
  if (result.curve) fmt::print("bifurcation.csv: {} points\n", result.curve->size());
  if (result.bounds) {
    fmt::print("cluster_bounds.csv: {} rows\n", result.bounds->size());
  } else {
    fmt::print("cluster bounds unavailable: {}\n", result.bounds_note);
  }
  return kOk;
}

int classify(const Options& opt) {
  const auto cfg = load(opt);
  std::cout << pco::cli::run_classify(cfg, opt.out_dir).dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven pulse-coupled oscillator networks with partial reset"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", opt.preset, "Start from a built-in preset")
        ->check(CLI::IsMember(pco::cli::preset_names()));
    cmd->add_option("--seed", opt.seed, "Override the configuration seed");
    cmd->add_option("--out-dir", opt.out_dir, "Directory for output files");
    cmd->add_option("--workers", opt.workers, "Sweep worker threads (0 = all cores)");
  };

  int (*action)(const Options&) = nullptr;
  struct Verb {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Verb verbs[] = {
      {"simulate", "Run one simulation and write its event log and summary", simulate},
      {"sweep", "Run the reset-strength sweep with independent seeded runs", sweep},
      {"theory", "Write the critical reset curve and cluster bounds", theory},
      {"classify", "Report the rise function's shape properties", classify},
  };
  for (const Verb& v : verbs) {
    CLI::App* cmd = app.add_subcommand(v.name, v.help);
    add_common(cmd);
    cmd->callback([&action, fn = v.fn] { action = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return action(opt);
  } catch (const pco::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const pco::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const pco::NonConvergence& e) {
    std::cerr << "nonconvergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
