#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "pco/analysis.hpp"
#include "pco/error.hpp"

namespace pco {

double spectral_radius_power(const Eigen::MatrixXd& p, double tolerance,
                             std::size_t max_iterations) {
  if (p.size() == 0) return 0.0;
  double norm = p.norm();
  if (norm == 0.0) return 0.0;
  // P^(2^k) = exp(log_scale) * q with ||q|| = 1.
  Eigen::MatrixXd q = p / norm;
  double log_scale = std::log(norm);
  double power = 1.0;
  double estimate = std::exp(log_scale);
  const std::size_t limit = std::min<std::size_t>(max_iterations, 1000);
  for (std::size_t k = 0; k < limit; ++k) {
    Eigen::MatrixXd sq = q * q;
    const double nu = sq.norm();
    if (nu == 0.0) return 0.0;
    q = sq / nu;
    log_scale = 2.0 * log_scale + std::log(nu);
    power *= 2.0;
    const double next = std::exp(log_scale / power);
    if (std::abs(next - estimate) <= tolerance * std::max(next, 1e-300)) return next;
    estimate = next;
  }
  return estimate;
}

double spectral_radius_dense(const Eigen::MatrixXd& p) {
  if (p.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(p, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityReport jacobian_at(const NetworkState& fixed_point, const CouplingMatrix& coupling,
                            const PartialReset& reset, const RiseFunction& u,
                            double fixed_point_tolerance) {
  const std::size_t n = fixed_point.size();
  StabilityReport report;
  if (n < 2) {
    report.stable = true;
    return report;
  }

  const ReturnResult ret = return_map(fixed_point, fixed_point.perm.front(), coupling, reset, u);
  if (ret.sequence.size() != n ||
      std::any_of(ret.sequence.begin(), ret.sequence.end(),
                  [](const FiringEvent& e) { return e.members.size() != 1; })) {
    throw ParameterError("state is not a splay state: the return map fires in groups");
  }
  double drift = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    drift = std::max(drift, std::abs(ret.state.phases[k] - fixed_point.phases[k]));
  }
  if (drift > fixed_point_tolerance) {
    throw ParameterError("state is not a fixed point of the return map (drift " +
                         std::to_string(drift) + ")");
  }

  const auto m = static_cast<Eigen::Index>(n - 1);
  report.period_product = Eigen::MatrixXd::Identity(m, m);
  NetworkState cur = fixed_point;
  for (std::size_t s = 0; s < n; ++s) {
    const auto sender = static_cast<std::size_t>(cur.perm.front());
    if (!coupling.column_uniform(sender, 1e-15 * std::max(1.0, coupling.sent(sender)))) {
      throw ParameterError("Jacobian needs uniform pulses from each sender");
    }
    const double eps = coupling.sent(sender);
    // slope[k] belongs to sorted index k + 1.
    std::vector<double> slope(n - 1);
    for (std::size_t k = 1; k < n; ++k) slope[k - 1] = subthreshold_slope(cur.phases[k], eps, u);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    a.col(0).setConstant(-slope[0]);
    for (Eigen::Index r = 0; r + 1 < m; ++r) a(r, r + 1) = slope[static_cast<std::size_t>(r + 1)];

    report.ek_bound = std::max(report.ek_bound, *std::max_element(slope.begin(), slope.end()));
    report.period_product = a * report.period_product;
    report.jacobians.push_back(std::move(a));
    report.entries.push_back(std::move(slope));
    cur = firing_map(cur, coupling, reset, u).next;
  }

  report.spectral_radius = spectral_radius_power(report.period_product);
  if (n <= 12) report.spectral_radius_dense = spectral_radius_dense(report.period_product);
  report.stable = report.spectral_radius < 1.0;
  return report;
}

double ek_root_bound(std::span<const double> coeffs) {
  if (coeffs.size() < 2) throw ParameterError("polynomial must have degree >= 1");
  for (double c : coeffs) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("coefficients must be positive");
  }
  double beta = 0.0;
  for (std::size_t i = 0; i + 1 < coeffs.size(); ++i) beta = std::max(beta, coeffs[i] / coeffs[i + 1]);
  return beta;
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
  if (coeffs.size() < 2 || coeffs.back() == 0.0) {
    throw ParameterError("polynomial needs degree >= 1 and a non-zero leading coefficient");
  }
  const auto deg = static_cast<Eigen::Index>(coeffs.size() - 1);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) {
    companion(i, deg - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace pco
