#pragma once

// Reference computations that share no code with the library: extended
// precision closed forms, an ODE integration of the U_b characterization and
// plain finite differences.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/numeric/odeint.hpp>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

inline double ub_value(double phi, double b) {
  const mp bb = b;
  return static_cast<double>(log(1 + (exp(bb) - 1) * mp(phi)) / bb);
}

inline double ub_inverse(double u, double b) {
  const mp bb = b;
  return static_cast<double>((exp(bb * mp(u)) - 1) / (exp(bb) - 1));
}

inline double ub_response(double phi, double eps, double b) {
  const mp bb = b;
  const mp u = log(1 + (exp(bb) - 1) * mp(phi)) / bb + mp(eps);
  return static_cast<double>((exp(bb * u) - 1) / (exp(bb) - 1));
}

// e^{b(1 - [(N - a) + c (a - 1)] eps)} - (e^{-b c eps} - 1) / (e^{-b eps} - 1), positive below the root.
inline mp critical_gap(const mp& c, int a, int n, const mp& eps, const mp& b) {
  return exp(b * (1 - ((n - a) + c * (a - 1)) * eps)) - (exp(-b * c * eps) - 1) / (exp(-b * eps) - 1);
}

inline double critical_reset(int a, int n, double eps, double b) {
  mp lo = 0;
  mp hi = 1;
  for (int k = 0; k < 120; ++k) {
    const mp mid = (lo + hi) / 2;
    if (critical_gap(mid, a, n, eps, b) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>((lo + hi) / 2);
}

// U' = g e^{-b U}, U(0) = 0, with g fixed by U(1) = 1 through shooting.
// Returns U on `grid` (ascending, inside [0, 1]).
inline std::vector<double> ub_from_ode(double b, const std::vector<double>& grid) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  auto integrate = [b](double g, const std::vector<double>& times) {
    State x{0.0};
    std::vector<double> out;
    auto rhs = [b, g](const State& s, State& ds, double) { ds[0] = g * std::exp(-b * s[0]); };
    auto stepper = ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
    std::vector<double> t{0.0};
    t.insert(t.end(), times.begin(), times.end());
    ode::integrate_times(stepper, rhs, x, t.begin(), t.end(), 1e-4,
                         [&out](const State& s, double) { out.push_back(s[0]); });
    out.erase(out.begin());
    return out;
  };
  double lo = 1e-6;
  double hi = 1e3;
  for (int k = 0; k < 200; ++k) {
    const double mid = std::sqrt(lo * hi);
    const double end = integrate(mid, {1.0}).back();
    if (!std::isfinite(end) || end > 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return integrate(std::sqrt(lo * hi), grid);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace oracle
