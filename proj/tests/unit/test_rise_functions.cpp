#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "pco/core.hpp"
#include "pco/error.hpp"
#include "pco/shape.hpp"

using namespace pco;

namespace {

std::vector<RiseFunction> sample_family() {
  return {make_identity(),
          make_ub(-3.0),
          make_ub(-0.5),
          make_ub(1.5),
          make_lif(1.1),
          make_lif(2.5, 0.7),
          to_conductance_based(make_lif(1.1), 3.0),
          to_conductance_based(make_lif(3.0), 1.1),
          make_qif(0.0, -1.0),
          make_qif(1.0, 0.0),
          make_qif(2.0, -0.5),
          to_conductance_based(make_qif(1.0, -1.0), 2.0)};
}

}  // namespace

TEST_SUITE("rise_functions") {

TEST_CASE("normalization, monotonicity and inverse") {
  for (const RiseFunction& u : sample_family()) {
    CAPTURE(u.name());
    CHECK(std::abs(u(0.0)) < 1e-14);
    CHECK(std::abs(u(1.0) - 1.0) < 1e-14);
    for (int k = 0; k <= 1000; ++k) {
      const double phi = k / 1000.0;
      CHECK(u.d1(phi) > 0.0);
      CHECK(std::abs(u.inverse(u(phi)) - phi) < 1e-10);
    }
  }
}

TEST_CASE("derivatives match central differences") {
  for (const RiseFunction& u : sample_family()) {
    CAPTURE(u.name());
    for (int k = 1; k < 20; ++k) {
      const double phi = k / 20.0;
      const double h = 1e-4;
      auto close = [](double a, double b) { return oracle::close_rel(a, b, 1e-5, 1e-7); };
      CHECK(close(u.d1(phi), oracle::central_difference([&](double x) { return u(x); }, phi, h)));
      CHECK(close(u.d2(phi), oracle::central_difference([&](double x) { return u.d1(x); }, phi, h)));
      CHECK(close(u.d3(phi), oracle::central_difference([&](double x) { return u.d2(x); }, phi, h)));
    }
  }
}

TEST_CASE("U_b closed form agrees with the ODE characterization") {
  std::vector<double> grid;
  for (int k = 1; k <= 100; ++k) grid.push_back(k / 100.0);
  for (double b : {-3.0, -1.0, 1.0}) {
    CAPTURE(b);
    const RiseFunction u = make_ub(b);
    const std::vector<double> ode = oracle::ub_from_ode(b, grid);
    REQUIRE(ode.size() == grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(u(grid[k]) - ode[k]) < 1e-8);
  }
}

TEST_CASE("U_b values and the constant phase-difference response") {
  constexpr double kUbHalf = 0.21485327632873441689;
  CHECK(oracle::ub_value(0.5, -3.0) == doctest::Approx(kUbHalf).epsilon(1e-15));
  CHECK(make_ub(-3.0)(0.5) == doctest::Approx(kUbHalf).epsilon(1e-14));

  const RiseFunction u = make_ub(-3.0);
  for (double eps : {0.01, 0.1, 0.3}) {
    for (double phi : {0.0, 0.2, 0.4}) {
      const double dphi = 0.05;
      if (u(phi + dphi) + eps > 1.0) continue;
      const double ratio =
          (subthreshold_response(phi + dphi, eps, u) - subthreshold_response(phi, eps, u)) / dphi;
      CHECK(ratio == doctest::Approx(std::exp(-3.0 * eps)).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(make_ub(0.0), ParameterError);
}

TEST_CASE("U_b curvature follows the sign of b") {
  for (int k = 0; k < 1000; ++k) {
    const double phi = (k + 0.5) / 1000.0;
    CHECK(make_ub(-3.0).d2(phi) > 0.0);
    CHECK(make_ub(2.0).d2(phi) < 0.0);
  }
}

TEST_CASE("LIF closed form") {
  constexpr double kLifHalf = 0.76833752096446001509;
  CHECK(make_lif(1.1)(0.5) == doctest::Approx(kLifHalf).epsilon(1e-14));
  CHECK(make_lif(1.1, 3.0)(0.5) == doctest::Approx(kLifHalf).epsilon(1e-14));
  CHECK_THROWS_AS(make_lif(1.0), ParameterError);
  CHECK_THROWS_AS(make_lif(1.5, 0.0), ParameterError);
}

TEST_CASE("conductance transform") {
  const RiseFunction base = make_lif(1.3);
  const RiseFunction far = to_conductance_based(base, 1e6);
  for (int k = 0; k <= 100; ++k) CHECK(std::abs(far(k / 100.0) - base(k / 100.0)) < 1e-5);
  CHECK_THROWS_AS(to_conductance_based(base, 1.0), ParameterError);

  // Exchanging E_eq and E_syn inverts the LIF conductance rise function.
  const RiseFunction a = to_conductance_based(make_lif(1.1), 3.0);
  const RiseFunction b = to_conductance_based(make_lif(3.0), 1.1);
  for (int k = 0; k <= 100; ++k) CHECK(std::abs(b(a(k / 100.0)) - k / 100.0) < 1e-12);
}

TEST_CASE("QIF domain") {
  CHECK_THROWS_AS(make_qif(-1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(make_qif(0.0, 0.0), ParameterError);
  CHECK_NOTHROW(make_qif(0.0, -2.0));
}

TEST_CASE("classification examples") {
  const ShapeReport lif = classify(make_lif(1.1));
  CHECK(lif.concave);
  CHECK(lif.icpd);
  CHECK_FALSE(lif.dcpd);
  CHECK(lif.method == ShapeMethod::ClosedFormTable);

  const ShapeReport cb = classify(to_conductance_based(make_lif(1.1), 3.0));
  CHECK(cb.concave);
  CHECK(cb.icpd);
  CHECK_FALSE(cb.dcpd);

  const ShapeReport cb_swapped = classify(to_conductance_based(make_lif(3.0), 1.1));
  CHECK(cb_swapped.convex);
  CHECK(cb_swapped.dcpd);
  CHECK_FALSE(cb_swapped.icpd);

  CHECK(classify(make_qif(0.0, -1.0)).convex);
  CHECK(classify(make_qif(1.0, -1.0)).sigmoidal);
  CHECK(classify(make_qif(1.0, 0.0)).concave);

  for (double b : {-3.0, -0.2, 0.7, 4.0}) {
    const ShapeReport r = classify(make_ub(b));
    CHECK(r.icpd);
    CHECK(r.dcpd);
    CHECK(r.convex == (b < 0.0));
    CHECK(r.concave == (b > 0.0));
  }

  const ShapeReport id = classify(make_identity());
  CHECK(id.icpd);
  CHECK(id.dcpd);
  CHECK(id.convex);
  CHECK(id.concave);
  CHECK(id.method == ShapeMethod::NumericScan);
}

TEST_CASE("convex and concave exclude each other away from the identity") {
  for (const RiseFunction& u : sample_family()) {
    if (u.family() == RiseFamily::Identity) continue;
    CAPTURE(u.name());
    const ShapeReport r = classify(u);
    CHECK_FALSE((r.convex && r.concave));
    CHECK(int(r.convex) + int(r.concave) + int(r.sigmoidal) == 1);
  }
}

TEST_CASE("custom rise functions are validated and classified numerically") {
  CustomRiseOps sq{[](double x) { return x * x; }, [](double u) { return std::sqrt(u); },
                   [](double x) { return 2.0 * x + 0.0; }, [](double) { return 2.0; },
                   [](double) { return 0.0; }};
  // U'(0) = 0 violates strict monotonicity.
  CHECK_THROWS_AS(make_custom("square", sq), ParameterError);

  CustomRiseOps soft{[](double x) { return 0.5 * x + 0.5 * x * x; },
                     [](double u) { return -0.5 + std::sqrt(0.25 + 2.0 * u); },
                     [](double x) { return 0.5 + x; }, [](double) { return 1.0; },
                     [](double) { return 0.0; }};
  const RiseFunction u = make_custom("soft", soft);
  const ShapeReport r = classify(u);
  CHECK(r.convex);
  CHECK(r.method == ShapeMethod::NumericScan);
  CHECK_FALSE(r.table.has_value());
}

TEST_CASE("nonlocal criterion certifies U_b both ways") {
  const NonlocalCheck ub = nonlocal_condition(make_ub(-2.0));
  CHECK(ub.icpd_sufficient);
  CHECK(ub.dcpd_sufficient);
  const PhaseDifferenceScan scan = scan_phase_difference(make_ub(-2.0));
  CHECK(std::abs(scan.min_slope) < 1e-9);
  CHECK(std::abs(scan.max_slope) < 1e-9);
}

}  // TEST_SUITE
