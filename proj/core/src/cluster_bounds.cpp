#include <algorithm>
#include <cmath>

#include "pco/analysis.hpp"
#include "pco/error.hpp"

namespace pco {

namespace {

void check_network(int a1, int n, double eps) {
  if (n < 1 || a1 < 1 || a1 > n) throw ParameterError("cluster size must satisfy 1 <= a1 <= N");
  if (!(eps > 0.0) || !((n - 1) * eps < 1.0)) {
    throw ParameterError("coupling must satisfy eps > 0 and (N - 1) eps < 1");
  }
}

ClusterBoundTerm bound_term(int a, int a1, int n, double eps, const PartialReset& reset,
                            const RiseFunction& u) {
  ClusterBoundTerm t;
  t.a = a;
  const double r_full = reset((a1 - 1) * eps);
  const double r_part = reset((a1 - 1 - a) * eps);
  const double rest = (n - a1) * eps;
  t.early_lhs = u.inverse(r_full) - u.inverse(r_part);
  t.early_rhs = u.inverse(1.0 - rest) - u.inverse(1.0 - rest - a * eps);
  t.late_lhs = u.inverse(r_full + rest) - u.inverse(r_part + rest);
  t.late_rhs = 1.0 - u.inverse(1.0 - a * eps);
  return t;
}

struct RoleSplit {
  bool sufficient;
  bool necessary;
};

RoleSplit assign_roles(const std::vector<ClusterBoundTerm>& terms, const ShapeReport& shape) {
  const bool early = std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.early_ok(); });
  const bool late = std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.late_ok(); });
  if (shape.icpd) return {early, late};
  if (shape.dcpd) return {late, early};
  throw ParameterError("cluster bounds need an icpd or dcpd rise function");
}

}  // namespace

bool cluster_instability(int a1, int n, double eps, const PartialReset& reset,
                         const RiseFunction& u, int samples) {
  check_network(a1, n, eps);
  if (a1 < 2) return false;
  const double lo = (a1 - 2) * eps;
  const double hi = (a1 - 1) * eps;
  for (int k = 0; k < samples; ++k) {
    const double zeta = lo + (hi - lo) * k / (samples - 1);
    const double rhs = u.d1(u.inverse(reset(zeta))) / u.d1(u.inverse(1.0 - (n - 1) * eps + zeta));
    if (!(reset.derivative(zeta) > rhs)) return false;
  }
  return true;
}

ClusterBound cluster_bounds(int a1, int n, double eps, const PartialReset& reset,
                            const RiseFunction& u, const ShapeReport& shape,
                            int instability_samples) {
  check_network(a1, n, eps);
  if (!shape.icpd && !shape.dcpd) {
    throw ParameterError("cluster bounds need an icpd or dcpd rise function");
  }
  ClusterBound out;
  out.a1 = a1;
  for (int a = 1; a < a1; ++a) out.terms.push_back(bound_term(a, a1, n, eps, reset, u));
  const RoleSplit roles = assign_roles(out.terms, shape);
  out.sufficient_ok = roles.sufficient;
  out.necessary_ok = roles.necessary;
  out.instability_ok = shape.dcpd && cluster_instability(a1, n, eps, reset, u, instability_samples);
  return out;
}

ResetBounds linear_reset_bounds(int a1, int n, double eps, const RiseFunction& u,
                                const ShapeReport& shape, int grid, double tol) {
  check_network(a1, n, eps);
  auto roles_at = [&](double c) {
    const PartialReset r = PartialReset::linear(c);
    std::vector<ClusterBoundTerm> terms;
    for (int a = 1; a < a1; ++a) terms.push_back(bound_term(a, a1, n, eps, r, u));
    return assign_roles(terms, shape);
  };
  // Last c at which the selected condition holds, scanning upward and then
  // bisecting the first failing grid cell.
  auto edge = [&](bool RoleSplit::*field) {
    if (!(roles_at(0.0).*field)) return 0.0;
    double prev = 0.0;
    for (int k = 1; k <= grid; ++k) {
      const double c = static_cast<double>(k) / grid;
      if (!(roles_at(c).*field)) {
        double lo = prev;
        double hi = c;
        while (hi - lo > tol) {
          const double mid = 0.5 * (lo + hi);
          if (roles_at(mid).*field) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        return lo;
      }
      prev = c;
    }
    return 1.0;
  };
  ResetBounds out;
  out.a1 = a1;
  out.sufficient_c = edge(&RoleSplit::sufficient);
  out.necessary_c = edge(&RoleSplit::necessary);
  return out;
}

CommutationBracket commutation_bracket(double phi, double psi, std::span<const ChainStep> chain,
                                       const RiseFunction& u) {
  if (psi > phi) throw ParameterError("commutation bracket needs psi <= phi");
  double eps = 0.0;
  for (const ChainStep& s : chain) {
    if (s.sigma < 0.0 || s.eps < 0.0) throw ParameterError("chain steps must be non-negative");
    eps += s.eps;
  }
  CommutationBracket out;
  const double top = compose_chain(phi, chain, u);
  out.middle = top - compose_chain(psi, chain, u);
  out.lower = subthreshold_response(phi, eps, u) - subthreshold_response(psi, eps, u);
  out.sigma_u = std::max(0.0, subthreshold_response_inverse(top, eps, u) - phi);
  out.upper = subthreshold_response(phi + out.sigma_u, eps, u) -
              subthreshold_response(psi + out.sigma_u, eps, u);
  return out;
}

}  // namespace pco
