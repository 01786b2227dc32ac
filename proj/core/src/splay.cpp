#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pco/analysis.hpp"
#include "pco/error.hpp"

namespace pco {

namespace {

struct MetaCoupling {
  std::vector<double> sent;  // strength received by every other unit
  std::vector<double> self;  // self-interaction
};

MetaCoupling meta_coupling(const CouplingMatrix& coupling) {
  const std::size_t n = coupling.size();
  MetaCoupling m;
  m.sent.resize(n);
  m.self.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!coupling.column_uniform(j, 1e-15 * std::max(1.0, coupling.sent(j)))) {
      throw ParameterError("splay solver needs meta-form coupling (uniform off-diagonal columns)");
    }
    m.sent[j] = coupling.sent(j);
    m.self[j] = coupling(j, j);
  }
  return m;
}

// Sub-threshold response for one sender, continued linearly with matching
// slope outside [0, U^-1(1 - eps)]. For U_b the response is affine, so the
// continuation is exact; for convex U the continued slopes stay below 1.
// A root with positive shifts keeps every trajectory inside the true domain,
// so such roots are unaffected.
struct ContinuedResponse {
  const RiseFunction* u;
  double eps;
  double lo_value, lo_slope;  // at phi = 0
  double hi_phi, hi_slope;    // at phi = U^-1(1 - eps), where H = 1

  ContinuedResponse(const RiseFunction& rise, double e)
      : u(&rise),
        eps(e),
        lo_value(rise.inverse(e)),
        lo_slope(rise.d1(0.0) / rise.d1(rise.inverse(e))),
        hi_phi(rise.inverse(1.0 - e)),
        hi_slope(rise.d1(rise.inverse(1.0 - e)) / rise.d1(1.0)) {}

  double value(double x) const {
    if (x < 0.0) return lo_value + lo_slope * x;
    if (x > hi_phi) return kThreshold + hi_slope * (x - hi_phi);
    return u->inverse(std::min(kThreshold, (*u)(x) + eps));
  }
  double slope(double x) const {
    if (x < 0.0) return lo_slope;
    if (x > hi_phi) return hi_slope;
    return u->d1(x) / u->d1(value(x));
  }
};

struct Continuation {
  const RiseFunction& u;
  std::vector<ContinuedResponse> responses;  // per sender

  Continuation(const RiseFunction& rise, const MetaCoupling& m) : u(rise) {
    for (double e : m.sent) responses.emplace_back(rise, e);
  }
};

// L_i - 1 and, when jac is non-null, row i of its Jacobian.
double residual_row(std::size_t i, std::span<const double> sigma, const MetaCoupling& m,
                    const PartialReset& reset, const Continuation& c, Eigen::MatrixXd* jac) {
  const std::size_t n = sigma.size();
  double x = c.u.inverse(reset(m.self[i])) + sigma[i];
  std::vector<double> slopes(n, 1.0);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t s = (i + k) % n;
    const ContinuedResponse& h = c.responses[s];
    if (jac) slopes[k] = h.slope(x);
    x = h.value(x) + sigma[s];
  }
  if (jac) {
    double tail = 1.0;
    for (std::size_t k = n; k-- > 1;) {
      (*jac)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + k) % n)) = tail;
      tail *= slopes[k];
    }
    (*jac)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = tail;
  }
  return x - kThreshold;
}

Eigen::VectorXd residual(std::span<const double> sigma, const MetaCoupling& m,
                         const PartialReset& reset, const Continuation& u, Eigen::MatrixXd* jac) {
  const std::size_t n = sigma.size();
  Eigen::VectorXd f(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    f(static_cast<Eigen::Index>(i)) = residual_row(i, sigma, m, reset, u, jac);
  }
  return f;
}

double max_abs(const Eigen::VectorXd& f) {
  return f.allFinite() ? f.cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
}

// Common shift sigma with mean(L_i(sigma, ..., sigma)) = 1. Every L_i grows
// at least linearly in the common shift. Returns NaN when the mean residual
// is already non-negative at lo.
double common_shift(const MetaCoupling& m, const PartialReset& reset, const Continuation& u,
                    double lo, double tol) {
  const std::size_t n = m.sent.size();
  auto mean_residual = [&](double s) {
    std::vector<double> sigma(n, s);
    const Eigen::VectorXd f = residual(sigma, m, reset, u, nullptr);
    return f.allFinite() ? f.mean() : std::numeric_limits<double>::infinity();
  };
  double a = lo;
  double b = 1.0;
  double fa = mean_residual(a);
  if (!(fa < 0.0)) return fa == 0.0 ? a : std::numeric_limits<double>::quiet_NaN();
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mean_residual(mid) < 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

bool is_homogeneous(const MetaCoupling& m) {
  return std::all_of(m.sent.begin(), m.sent.end(), [&](double s) { return s == m.sent[0]; }) &&
         std::all_of(m.self.begin(), m.self.end(), [&](double s) { return s == m.self[0]; });
}

std::optional<SplaySolution> finish(std::vector<double> sigma, const CouplingMatrix& coupling,
                                    const MetaCoupling& m, const PartialReset& reset,
                                    const RiseFunction& u) {
  const Eigen::VectorXd f = residual(sigma, m, reset, Continuation(u, m), nullptr);
  if (std::any_of(sigma.begin(), sigma.end(), [](double s) { return s <= 0.0; })) {
    return std::nullopt;
  }
  SplaySolution sol;
  sol.residual = max_abs(f);
  std::vector<double> phases = splay_phases(sigma, coupling, u);
  sol.state.phases = std::move(phases);
  sol.state.perm.resize(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) sol.state.perm[k] = static_cast<int>(k);
  sol.sigma_star = std::move(sigma);
  return sol;
}

}  // namespace

std::vector<double> splay_residual(std::span<const double> sigma, const CouplingMatrix& coupling,
                                   const PartialReset& reset, const RiseFunction& u) {
  if (sigma.size() != coupling.size()) throw ParameterError("shift vector size mismatch");
  const MetaCoupling m = meta_coupling(coupling);
  const Eigen::VectorXd f = residual(sigma, m, reset, Continuation(u, m), nullptr);
  return {f.data(), f.data() + f.size()};
}

std::vector<double> splay_phases(std::span<const double> sigma, const CouplingMatrix& coupling,
                                 const RiseFunction& u) {
  const std::size_t n = sigma.size();
  std::vector<double> phases(n, kThreshold);
  for (std::size_t i = 1; i < n; ++i) {
    double x = kThreshold;
    for (std::size_t r = i; r-- > 0;) {
      x = u.inverse(u(x - sigma[r]) - coupling.sent(r));
    }
    phases[i] = x;
  }
  return phases;
}

std::optional<SplaySolution> solve_splay(const CouplingMatrix& coupling, const PartialReset& reset,
                                         const RiseFunction& u, const SplayOptions& options) {
  const MetaCoupling m = meta_coupling(coupling);
  const std::size_t n = m.sent.size();
  const Continuation ext(u, m);

  if (is_homogeneous(m)) {
    // L is increasing with slope >= 1, so L(0) >= 1 rules out a positive root.
    const double s = common_shift(m, reset, ext, 0.0, options.bisection_tolerance);
    if (std::isnan(s)) return std::nullopt;
    return finish(std::vector<double>(n, s), coupling, m, reset, u);
  }

  double seed = common_shift(m, reset, ext, -1.0, options.bisection_tolerance);
  if (std::isnan(seed)) seed = 0.0;
  std::vector<double> sigma(n, seed);

  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd f = residual(sigma, m, reset, ext, &jac);
  double norm = max_abs(f);

  // Newton with backtracking on the max-norm of the residual.
  const std::size_t newton_limit = std::min<std::size_t>(options.max_iterations, 200);
  for (std::size_t it = 0; it < newton_limit && norm > options.tolerance; ++it) {
    const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half, lambda *= 0.5) {
      std::vector<double> trial(n);
      for (std::size_t k = 0; k < n; ++k) trial[k] = sigma[k] + lambda * step(static_cast<Eigen::Index>(k));
      Eigen::MatrixXd trial_jac(jac.rows(), jac.cols());
      const Eigen::VectorXd trial_f = residual(trial, m, reset, ext, &trial_jac);
      const double trial_norm = max_abs(trial_f);
      if (trial_norm < norm || (trial_norm <= norm && trial_norm <= options.tolerance)) {
        sigma = std::move(trial);
        f = trial_f;
        jac = std::move(trial_jac);
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  // Damped fixed-point fallback. Jacobian row sums are of order n, hence the
  // 1/n scaling of the step.
  if (norm > options.tolerance) {
    const double lambda = 0.5 / static_cast<double>(n);
    for (std::size_t it = 0; it < options.max_iterations && norm > options.tolerance; ++it) {
      for (std::size_t k = 0; k < n; ++k) sigma[k] -= lambda * f(static_cast<Eigen::Index>(k));
      f = residual(sigma, m, reset, ext, nullptr);
      norm = max_abs(f);
      if (!std::isfinite(norm)) break;
    }
  }

  if (!(norm <= options.tolerance)) {
    throw NonConvergence("splay solver did not converge; residual " + std::to_string(norm));
  }
  return finish(std::move(sigma), coupling, m, reset, u);
}

}  // namespace pco
