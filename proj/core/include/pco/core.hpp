#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pco/rise_function.hpp"

namespace pco {

inline constexpr double kResetPotential = 0.0;
inline constexpr double kThreshold = 1.0;
inline constexpr double kPeriod = 1.0;

// Default absolute tolerance for fixed-point and round-trip comparisons.
inline constexpr double kTolerance = 1e-9;
// Phases within this distance of threshold count as at threshold.
inline constexpr double kThresholdTolerance = 1e-12;

// Map from supra-threshold charge zeta >= 0 to the potential left after a
// reset. R(0) = 0 and R is non-decreasing.
class PartialReset {
 public:
  enum class Kind { Linear, Custom };

  // R(zeta) = c * zeta.
  static PartialReset linear(double c);
  static PartialReset custom(std::function<double(double)> value,
                             std::function<double(double)> derivative);

  double operator()(double zeta) const { return value_(zeta); }
  double evaluate(double zeta) const { return value_(zeta); }
  double derivative(double zeta) const { return derivative_(zeta); }

  Kind kind() const { return kind_; }
  // Slope of the linear family; NaN for custom resets.
  double c() const { return c_; }

  // 0 <= R(zeta) <= zeta on a grid over [0, zeta_max].
  bool is_neuronal(double zeta_max = 1.0, int samples = 1001) const;
  bool is_monotone(double zeta_max = 1.0, int samples = 1001) const;

 private:
  PartialReset(Kind kind, double c, std::function<double(double)> value,
               std::function<double(double)> derivative);

  Kind kind_;
  double c_;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
};

// entries(i, j) is the pulse strength received by i when j fires.
class CouplingMatrix {
 public:
  static CouplingMatrix homogeneous(std::size_t n, double eps);
  // One meta-oscillator per cluster: off-diagonal a_j * eps, diagonal (a_i - 1) * eps.
  static CouplingMatrix meta(std::span<const int> cluster_sizes, double eps);
  static CouplingMatrix random_uniform(std::size_t n, double eps_min, double eps_max,
                                       std::mt19937_64& rng);
  static CouplingMatrix from_entries(Eigen::MatrixXd entries);

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& entries() const { return entries_; }

  // Largest total input any unit can receive from one round of firing.
  double max_row_sum() const;
  // Strength j sends to every other unit; exact for homogeneous and meta
  // matrices, the column mean of off-diagonal entries otherwise.
  double sent(std::size_t j) const;
  // All off-diagonal entries in column j are equal.
  bool column_uniform(std::size_t j, double tol = 0.0) const;

 private:
  explicit CouplingMatrix(Eigen::MatrixXd entries);
  Eigen::MatrixXd entries_;
};

// Sub-threshold response U^-1(U(phi) + eps). Requires U(phi) + eps <= 1.
double subthreshold_response(double phi, double eps, const RiseFunction& u);
// Inverse sub-threshold response U^-1(U(phi) - eps). Requires U(phi) - eps >= 0.
double subthreshold_response_inverse(double phi, double eps, const RiseFunction& u);
// Supra-threshold response U^-1(R(U(phi) + eps - 1)). Requires U(phi) + eps >= 1.
double suprathreshold_response(double phi, double eps, const PartialReset& r,
                               const RiseFunction& u);
inline double shift_phase(double phi, double sigma) { return phi + sigma; }

// d/dphi of the sub-threshold response: U'(phi) / U'(H(phi, eps)).
double subthreshold_slope(double phi, double eps, const RiseFunction& u);

struct ChainStep {
  double sigma;
  double eps;
};

// Applies the sub-threshold response then the shift for each step in order.
double compose_chain(double phi, std::span<const ChainStep> chain, const RiseFunction& u);

}  // namespace pco
