#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pco/core.hpp"
#include "pco/rise_function.hpp"

namespace pco::cli {

// Invalid configuration. `path()` is the dotted field path, e.g. "coupling.eps".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct CouplingSpec {
  enum class Kind { Homogeneous, RandomUniform, Meta };
  Kind kind = Kind::Homogeneous;
  double eps = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  std::vector<int> sizes;  // meta: one cluster size per meta-oscillator
};

struct RiseSpec {
  std::string family = "ub";  // identity, ub, lif, lif_cb, qif, qif_cb
  double b = -3.0;
  double e_eq = 1.1;
  double g_l = 1.0;
  double e_syn = 3.0;
  double alpha = 0.0;
  double beta = -1.0;
};

struct ResetSpec {
  enum class Kind { Linear, Table };
  Kind kind = Kind::Linear;
  double c = 0.0;
  // Table: piecewise linear through (zeta[k], value[k]), zeta[0] = value[0] = 0,
  // continued with the last slope.
  std::vector<double> zeta;
  std::vector<double> value;
};

struct InitialSpec {
  enum class Kind { PerturbedSync, UniformRandom, Phases };
  Kind kind = Kind::PerturbedSync;
  double magnitude = 1e-3;
  std::vector<double> phases;
};

struct DurationSpec {
  std::size_t max_events = 100000;
  double max_time = 0.0;
  bool stop_when_periodic = true;
  std::size_t extra_periods = 1;
};

struct DetectSpec {
  double tolerance = 1e-7;
  std::size_t window = 0;
};

struct SweepSpec {
  std::vector<double> c;
  std::size_t runs_per_point = 1;
};

struct TheorySpec {
  int a_min = 2;
  int a_max = 0;  // 0 means n
};

struct OutputSpec {
  bool event_log = true;
  bool snapshots = false;
};

struct ExperimentConfig {
  std::string name = "custom";
  int n = 0;
  std::optional<std::uint64_t> seed;
  CouplingSpec coupling;
  RiseSpec rise;
  ResetSpec reset;
  InitialSpec initial;
  DurationSpec duration;
  DetectSpec detect;
  std::optional<SweepSpec> sweep;
  TheorySpec theory;
  OutputSpec output;

  // True when the run draws random numbers (and therefore needs a seed).
  bool randomized() const;
};

// Parses and validates. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json& doc);

// Preset document by name (fig3, fig6, fig7, fig8). Throws ConfigError.
nlohmann::json preset(const std::string& name);
std::vector<std::string> preset_names();

// Preset (if any) with the file's contents merge-patched on top.
nlohmann::json compose_config(const std::optional<std::string>& preset_name,
                              const std::optional<std::string>& file);

RiseFunction build_rise(const RiseSpec& spec);
PartialReset build_reset(const ResetSpec& spec);
PartialReset build_reset(const ResetSpec& spec, double c);  // linear override
// Coupling for the experiment; random couplings draw from `coupling_seed`.
CouplingMatrix build_coupling(const ExperimentConfig& config, std::uint64_t coupling_seed);

}  // namespace pco::cli
