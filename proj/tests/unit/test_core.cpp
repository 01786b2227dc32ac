#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "pco/core.hpp"
#include "pco/error.hpp"

using namespace pco;

TEST_SUITE("core") {

TEST_CASE("sub-threshold response on closed-form examples") {
  const RiseFunction id = make_identity();
  const RiseFunction ub = make_ub(-3.0);
  CHECK(subthreshold_response(0.4, 0.0, ub) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(subthreshold_response(0.3, 0.2, id) == doctest::Approx(0.5).epsilon(1e-15));

  // Frozen from an extended-precision evaluation of the closed forms.
  constexpr double kResponse = 0.64317089950436545663;
  CHECK(oracle::ub_response(0.5, 0.1, -3.0) == doctest::Approx(kResponse).epsilon(1e-15));
  CHECK(subthreshold_response(0.5, 0.1, ub) == doctest::Approx(kResponse).epsilon(1e-14));
}

TEST_CASE("inverse sub-threshold response") {
  const RiseFunction id = make_identity();
  const RiseFunction ub = make_ub(-3.0);
  CHECK(subthreshold_response_inverse(subthreshold_response(0.3, 0.2, ub), 0.2, ub) ==
        doctest::Approx(0.3).epsilon(1e-12));
  CHECK(subthreshold_response_inverse(0.5, 0.2, id) == doctest::Approx(0.3).epsilon(1e-15));

  constexpr double kInverse = 0.87533715786328831967;
  CHECK(oracle::ub_response(0.9, -0.05, -3.0) == doctest::Approx(kInverse).epsilon(1e-15));
  CHECK(subthreshold_response_inverse(0.9, 0.05, ub) == doctest::Approx(kInverse).epsilon(1e-14));

  CHECK_THROWS_AS(subthreshold_response_inverse(0.01, 0.5, ub), DomainError);
}

TEST_CASE("sub-threshold response rejects supra-threshold input") {
  const RiseFunction ub = make_ub(-3.0);
  CHECK_THROWS_AS(subthreshold_response(0.99, 0.2, ub), DomainError);
  CHECK_THROWS_AS(subthreshold_response(0.5, -0.1, ub), DomainError);
  CHECK_NOTHROW(subthreshold_response(1.0, 0.0, ub));
}

TEST_CASE("supra-threshold response") {
  const RiseFunction id = make_identity();
  const RiseFunction ub = make_ub(-3.0);
  const PartialReset half = PartialReset::linear(0.5);
  CHECK(suprathreshold_response(0.75, 0.25, half, id) == 0.0);
  CHECK(suprathreshold_response(1.0, 0.0, half, ub) == 0.0);
  CHECK(suprathreshold_response(1.0, 0.6, half, id) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(suprathreshold_response(1.0, 0.4, PartialReset::linear(0.0), ub) == 0.0);

  CHECK_THROWS_AS(suprathreshold_response(0.2, 0.1, half, id), DomainError);
  const PartialReset huge = PartialReset::linear(5.0);
  CHECK_THROWS_AS(suprathreshold_response(1.0, 0.3, huge, id), DomainError);
}

TEST_CASE("shift") {
  CHECK(shift_phase(0.2, 0.3) == doctest::Approx(0.5));
  CHECK(shift_phase(0.7, 0.0) == 0.7);
  CHECK(shift_phase(shift_phase(0.1, 0.2), -0.2) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("chain composition") {
  const RiseFunction id = make_identity();
  CHECK(compose_chain(0.3, {}, id) == 0.3);
  const std::vector<ChainStep> one{{0.1, 0.2}};
  CHECK(compose_chain(0.3, one, id) == doctest::Approx(0.6).epsilon(1e-15));

  // U_b scales phase differences by e^{b total eps}, whatever the shifts.
  const double b = -3.0;
  const RiseFunction ub = make_ub(b);
  const std::vector<ChainStep> two{{0.05, 0.03}, {0.02, 0.04}};
  const double phi = 0.4;
  const double psi = 0.35;
  const double diff = compose_chain(phi, two, ub) - compose_chain(psi, two, ub);
  CHECK(diff == doctest::Approx((phi - psi) * std::exp(b * 0.07)).epsilon(1e-12));
}

TEST_CASE("chain composition reports the failing step") {
  const RiseFunction id = make_identity();
  const std::vector<ChainStep> chain{{0.1, 0.1}, {0.0, 0.5}, {0.0, 0.1}};
  try {
    (void)compose_chain(0.5, chain, id);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("response properties on random samples") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<RiseFunction> family{make_ub(-3.0), make_ub(2.0), make_lif(1.3),
                                         to_conductance_based(make_lif(1.1), 3.0),
                                         make_qif(1.0, -1.0)};
  const PartialReset reset = PartialReset::linear(0.6);
  for (const RiseFunction& u : family) {
    CAPTURE(u.name());
    for (int k = 0; k < 200; ++k) {
      const double phi = 0.8 * unit(rng);
      const double room = 1.0 - u(phi);
      const double e1 = 0.5 * room * unit(rng);
      const double e2 = 0.5 * room * unit(rng);
      // Semigroup and round trip.
      CHECK(subthreshold_response(subthreshold_response(phi, e1, u), e2, u) ==
            doctest::Approx(subthreshold_response(phi, e1 + e2, u)).epsilon(1e-12));
      CHECK(std::abs(subthreshold_response_inverse(subthreshold_response(phi, e1, u), e1, u) - phi) <
            1e-12);
      // Strict monotonicity in phase.
      const double phi2 = phi + 0.1 * (1.0 - phi) * (0.01 + unit(rng));
      if (u(phi2) + e1 <= 1.0) {
        CHECK(subthreshold_response(phi, e1, u) < subthreshold_response(phi2, e1, u));
      }
      // A neuronal reset never leaves more than the surplus.
      const double eps = room + 0.3 * unit(rng);
      const double jump = suprathreshold_response(phi, eps, reset, u);
      CHECK(u(jump) <= u(phi) + eps - 1.0 + 1e-15);
      const double jump2 = suprathreshold_response(std::min(1.0, phi + 0.05), eps, reset, u);
      CHECK(jump <= jump2);
    }
  }
}

TEST_CASE("subthreshold slope matches finite differences") {
  for (const RiseFunction& u : {make_ub(-3.0), make_lif(1.2), make_qif(0.5, -2.0),
                                to_conductance_based(make_qif(1.0, -1.0), 2.0)}) {
    CAPTURE(u.name());
    for (double phi = 0.1; phi < 0.85; phi += 0.1) {
      const double eps = 0.05;
      const double fd = oracle::central_difference(
          [&](double x) { return subthreshold_response(x, eps, u); }, phi, 1e-6);
      CHECK(oracle::close_rel(subthreshold_slope(phi, eps, u), fd, 1e-5));
    }
  }
}

TEST_CASE("partial reset invariants") {
  const PartialReset r = PartialReset::linear(0.4);
  CHECK(r(0.0) == 0.0);
  CHECK(r(0.5) == doctest::Approx(0.2));
  CHECK(r.derivative(0.3) == 0.4);
  CHECK(r.kind() == PartialReset::Kind::Linear);
  CHECK(r.is_monotone());
  CHECK(r.is_neuronal());
  CHECK_FALSE(PartialReset::linear(1.5).is_neuronal());
  CHECK(PartialReset::linear(1.5).is_monotone());
  CHECK_THROWS_AS(PartialReset::linear(-0.1), ParameterError);

  const PartialReset sq = PartialReset::custom([](double z) { return z * z; },
                                               [](double z) { return 2.0 * z; });
  CHECK(sq.kind() == PartialReset::Kind::Custom);
  CHECK(sq.is_neuronal());
  CHECK_THROWS_AS(PartialReset::custom([](double z) { return z + 0.1; }, [](double) { return 1.0; }),
                  ParameterError);
}

TEST_CASE("coupling constructors") {
  const CouplingMatrix h = CouplingMatrix::homogeneous(4, 0.1);
  CHECK(h.size() == 4);
  CHECK(h(0, 0) == 0.0);
  CHECK(h(1, 2) == 0.1);
  CHECK(h.max_row_sum() == doctest::Approx(0.3));
  CHECK(h.sent(3) == doctest::Approx(0.1).epsilon(1e-15));

  const std::vector<int> sizes{3, 1, 2};
  const CouplingMatrix m = CouplingMatrix::meta(sizes, 0.05);
  CHECK(m(0, 0) == doctest::Approx(0.10));
  CHECK(m(2, 2) == doctest::Approx(0.05));
  CHECK(m(1, 1) == 0.0);
  CHECK(m(1, 0) == doctest::Approx(0.15));
  CHECK(m(0, 2) == doctest::Approx(0.10));
  CHECK(m.column_uniform(0));

  std::mt19937_64 rng(3);
  const CouplingMatrix r = CouplingMatrix::random_uniform(20, 0.009, 0.011, rng);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(r(i, i) == 0.0);
    for (std::size_t j = 0; j < 20; ++j) {
      if (i != j) CHECK((r(i, j) >= 0.009 && r(i, j) <= 0.011));
    }
  }

  CHECK_THROWS_AS(CouplingMatrix::homogeneous(11, 0.1), ParameterError);
  Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(2, 2);
  neg(0, 1) = -0.1;
  CHECK_THROWS_AS(CouplingMatrix::from_entries(neg), ParameterError);
}

}  // TEST_SUITE
