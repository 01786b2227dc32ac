#include "pco/core.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "pco/error.hpp"

namespace pco {

PartialReset::PartialReset(Kind kind, double c, std::function<double(double)> value,
                           std::function<double(double)> derivative)
    : kind_(kind), c_(c), value_(std::move(value)), derivative_(std::move(derivative)) {}

PartialReset PartialReset::linear(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("linear reset requires c >= 0");
  return PartialReset(
      Kind::Linear, c, [c](double zeta) { return c * zeta; }, [c](double) { return c; });
}

PartialReset PartialReset::custom(std::function<double(double)> value,
                                  std::function<double(double)> derivative) {
  if (!value || !derivative) throw ParameterError("custom reset needs value and derivative");
  if (std::abs(value(0.0)) > kTolerance) throw ParameterError("custom reset must satisfy R(0) = 0");
  return PartialReset(Kind::Custom, std::numeric_limits<double>::quiet_NaN(), std::move(value),
                      std::move(derivative));
}

bool PartialReset::is_neuronal(double zeta_max, int samples) const {
  for (int k = 0; k < samples; ++k) {
    const double zeta = zeta_max * k / (samples - 1);
    const double r = value_(zeta);
    if (r < -kTolerance || r > zeta + kTolerance) return false;
  }
  return true;
}

bool PartialReset::is_monotone(double zeta_max, int samples) const {
  double prev = value_(0.0);
  for (int k = 1; k < samples; ++k) {
    const double r = value_(zeta_max * k / (samples - 1));
    if (r < prev - kTolerance) return false;
    prev = r;
  }
  return true;
}

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw ParameterError("coupling matrix must be square and non-empty");
  }
  if (!entries_.allFinite() || (entries_.array() < 0.0).any()) {
    throw ParameterError("coupling entries must be finite and non-negative");
  }
  if (max_row_sum() >= kThreshold - kResetPotential) {
    throw ParameterError("coupling violates the safety bound: max row sum must be < 1, got " +
                         std::to_string(max_row_sum()));
  }
}

CouplingMatrix CouplingMatrix::homogeneous(std::size_t n, double eps) {
  if (!(eps >= 0.0)) throw ParameterError("coupling strength must be >= 0");
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(dim, dim, eps);
  m.diagonal().setZero();
  return CouplingMatrix(std::move(m));
}

CouplingMatrix CouplingMatrix::meta(std::span<const int> cluster_sizes, double eps) {
  if (!(eps >= 0.0)) throw ParameterError("coupling strength must be >= 0");
  const auto dim = static_cast<Eigen::Index>(cluster_sizes.size());
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int a = cluster_sizes[static_cast<std::size_t>(j)];
    if (a < 1) throw ParameterError("cluster sizes must be >= 1");
    m.col(j).setConstant(a * eps);
    m(j, j) = (a - 1) * eps;
  }
  return CouplingMatrix(std::move(m));
}

CouplingMatrix CouplingMatrix::random_uniform(std::size_t n, double eps_min, double eps_max,
                                              std::mt19937_64& rng) {
  if (!(eps_min >= 0.0) || !(eps_max >= eps_min)) {
    throw ParameterError("random coupling requires 0 <= eps_min <= eps_max");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  std::uniform_real_distribution<double> dist(eps_min, eps_max);
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = (i == j) ? 0.0 : dist(rng);
  }
  return CouplingMatrix(std::move(m));
}

CouplingMatrix CouplingMatrix::from_entries(Eigen::MatrixXd entries) {
  return CouplingMatrix(std::move(entries));
}

double CouplingMatrix::max_row_sum() const { return entries_.rowwise().sum().maxCoeff(); }

double CouplingMatrix::sent(std::size_t j) const {
  const auto col = static_cast<Eigen::Index>(j);
  const Eigen::Index n = entries_.rows();
  if (n == 1) return 0.0;
  return (entries_.col(col).sum() - entries_(col, col)) / static_cast<double>(n - 1);
}

bool CouplingMatrix::column_uniform(std::size_t j, double tol) const {
  const auto col = static_cast<Eigen::Index>(j);
  const double ref = sent(j);
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    if (i != col && std::abs(entries_(i, col) - ref) > tol) return false;
  }
  return true;
}

double subthreshold_response(double phi, double eps, const RiseFunction& u) {
  if (eps < 0.0) throw DomainError("sub-threshold response requires eps >= 0");
  double target = u(phi) + eps;
  if (target > kThreshold) {
    if (target > kThreshold + kThresholdTolerance) {
      throw DomainError("sub-threshold response evaluated above threshold; use the supra-threshold map");
    }
    target = kThreshold;
  }
  return u.inverse(target);
}

double subthreshold_response_inverse(double phi, double eps, const RiseFunction& u) {
  if (eps < 0.0) throw DomainError("inverse sub-threshold response requires eps >= 0");
  double target = u(phi) - eps;
  if (target < kResetPotential) {
    if (target < kResetPotential - kThresholdTolerance) {
      throw DomainError("inverse sub-threshold response evaluated below the reset potential");
    }
    target = kResetPotential;
  }
  return u.inverse(target);
}

double suprathreshold_response(double phi, double eps, const PartialReset& r,
                               const RiseFunction& u) {
  double zeta = u(phi) + eps - kThreshold;
  if (zeta < 0.0) {
    if (zeta < -kThresholdTolerance) {
      throw DomainError("supra-threshold response requires U(phi) + eps >= 1");
    }
    zeta = 0.0;
  }
  const double reset = r(zeta);
  if (reset >= kThreshold) throw DomainError("partial reset lands at or above threshold");
  if (reset < kResetPotential) throw DomainError("partial reset lands below the reset potential");
  return u.inverse(reset);
}

double subthreshold_slope(double phi, double eps, const RiseFunction& u) {
  return u.d1(phi) / u.d1(subthreshold_response(phi, eps, u));
}

double compose_chain(double phi, std::span<const ChainStep> chain, const RiseFunction& u) {
  for (std::size_t k = 0; k < chain.size(); ++k) {
    try {
      phi = shift_phase(subthreshold_response(phi, chain[k].eps, u), chain[k].sigma);
    } catch (const DomainError& e) {
      throw DomainError("chain step " + std::to_string(k) + ": " + e.what());
    }
  }
  return phi;
}

}  // namespace pco
