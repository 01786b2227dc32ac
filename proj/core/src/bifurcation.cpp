#include <cmath>

#include "pco/analysis.hpp"
#include "pco/error.hpp"

namespace pco {

namespace {

void check_ub_network(int n, double eps, double b) {
  if (!(b < 0.0) || !std::isfinite(b)) throw ParameterError("exact bifurcation points need b < 0");
  if (n < 2 || !(eps > 0.0) || !((n - 1) * eps < 1.0)) {
    throw ParameterError("exact bifurcation points need N >= 2, eps > 0 and (N - 1) eps < 1");
  }
}

}  // namespace

double c_critical_gap(double c, int a, int n, double eps, double b) {
  const double lhs = std::exp(b * (1.0 - ((n - a) + c * (a - 1)) * eps));
  const double rhs = std::expm1(-b * c * eps) / std::expm1(-b * eps);
  return lhs - rhs;
}

double c_critical(int a, int n, double eps, double b, double tol) {
  check_ub_network(n, eps, b);
  if (a < 2 || a > n) throw ParameterError("cluster size must satisfy 2 <= a <= N");
  double lo = 0.0;
  double hi = 1.0;
  if (!(c_critical_gap(lo, a, n, eps, b) > 0.0) || !(c_critical_gap(hi, a, n, eps, b) < 0.0)) {
    throw ParameterError("no sign change of the critical-reset equation on (0, 1)");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (c_critical_gap(mid, a, n, eps, b) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double c_critical_pair(int n, double eps, double b) {
  check_ub_network(n, eps, b);
  return std::log1p(std::exp(-b * (n - 2) * eps + b) * -std::expm1(-b * eps)) / (b * eps);
}

std::vector<BifurcationPoint> bifurcation_curve(int n, double eps, double b) {
  check_ub_network(n, eps, b);
  std::vector<BifurcationPoint> curve;
  for (int a = 2; a <= n; ++a) {
    BifurcationPoint p;
    p.a = a;
    if (a == 2) {
      p.c_cr = c_critical_pair(n, eps, b);
      p.method = "closed-form";
    } else {
      p.c_cr = c_critical(a, n, eps, b);
      p.method = "bisection";
    }
    p.residual = c_critical_gap(p.c_cr, a, n, eps, b);
    curve.push_back(p);
  }
  return curve;
}

double delta_return_map_ub_domain(double eps, double b) {
  return 1.0 - std::expm1(b * (1.0 - eps)) / std::expm1(b);
}

double delta_return_map_ub(double dphi, int a1, int n, double eps, double c, double b) {
  check_ub_network(n, eps, b);
  if (a1 < 1 || a1 > n) throw ParameterError("avalanche size must satisfy 1 <= a1 <= N");
  if (!(c >= 0.0 && c <= 1.0)) throw ParameterError("linear reset slope must lie in [0, 1]");
  const double top = delta_return_map_ub_domain(eps, b);
  if (!(dphi >= 0.0) || dphi > top + 1e-15) {
    throw DomainError("phase difference outside [0, 1 - U_b^-1(1 - eps)]");
  }
  // e^{-bc} (e^b + (1 - e^b) dphi)^c = (1 + (e^{-b} - 1) dphi)^c.
  const double scale = std::exp(b * eps * ((n - a1) + c * (a1 - 1))) / -std::expm1(b);
  return scale * std::expm1(c * std::log1p(std::expm1(-b) * dphi));
}

}  // namespace pco
