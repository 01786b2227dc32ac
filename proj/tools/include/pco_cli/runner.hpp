#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pco/analysis.hpp"
#include "pco/engine.hpp"
#include "pco/shape.hpp"
#include "pco_cli/config.hpp"

namespace pco::cli {

// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Seed of run `run` at sweep point `point`:
//   mix(mix(mix(seed) ^ point) ^ run), mix = splitmix64.
// A single run uses (0, 0), so a one-point one-run sweep repeats it exactly.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t run);

// Stream reserved for drawing random coupling matrices; fixed per experiment.
inline constexpr std::uint64_t kCouplingStream = ~std::uint64_t{0};

// Initial section state for the configured initial condition.
NetworkState initial_state(const ExperimentConfig& config, std::uint64_t seed);

struct RunRow {
  std::size_t point = 0;
  std::size_t run = 0;
  double c = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // or the error message
  std::size_t events = 0;
  double time = 0.0;
  bool periodic = false;
  std::optional<double> period;
  std::vector<int> sizes;
  // U_b experiments only: false when the run contradicts the critical reset curve.
  std::optional<bool> theory_ok;

  int max_size() const { return sizes.empty() ? 0 : sizes.front(); }
};

struct SingleResult {
  RunRow row;
  EventLog log;
  ClusterPartition partition;
};

// Simulates the configuration with its own reset. Writes events.jsonl (unless
// disabled), summary.csv and, on request, snapshots.csv into out_dir.
SingleResult run_single(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct PointSummary {
  std::size_t point = 0;
  double c = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  int max_cluster_min = 0;
  int max_cluster_max = 0;
  double max_cluster_mean = 0.0;
  std::size_t periodic_runs = 0;
  std::optional<int> theory_bound;  // smallest a with c_cr(a) < c, else n
  std::size_t theory_violations = 0;
};

struct SweepSummary {
  std::vector<RunRow> rows;  // ordered by (point, run)
  std::vector<PointSummary> points;
};

// Rows go to sweep_runs.csv as soon as every earlier row is done; per-point
// aggregates go to sweep_points.csv at the end. workers = 0 uses all cores.
SweepSummary run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                       unsigned workers);

// Aggregates recomputed from rows; run_sweep writes exactly these.
std::vector<PointSummary> summarize(const ExperimentConfig& config, const std::vector<RunRow>& rows);

struct TheoryResult {
  std::optional<std::vector<BifurcationPoint>> curve;  // U_b with b < 0 only
  std::optional<std::vector<ResetBounds>> bounds;      // icpd or dcpd rise functions
  std::string bounds_note;                             // why bounds are unavailable
  std::optional<ShapeReport> shape;
};

// Writes bifurcation.csv and cluster_bounds.csv when available.
TheoryResult run_theory(const ExperimentConfig& config, const std::filesystem::path& out_dir);

nlohmann::json shape_to_json(const RiseFunction& u, const ShapeReport& report);

// Writes shape.json.
nlohmann::json run_classify(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace pco::cli
