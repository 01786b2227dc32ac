#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pco/core.hpp"
#include "pco/engine.hpp"
#include "pco/rise_function.hpp"
#include "pco/shape.hpp"

namespace pco {

// ---- splay (asynchronous) states of meta-oscillator networks ----

struct SplayOptions {
  double tolerance = 1e-13;
  std::size_t max_iterations = 100000;
  double bisection_tolerance = 1e-15;
};

struct SplaySolution {
  std::vector<double> sigma_star;
  NetworkState state;  // perm is the identity, phases[0] = 1
  double residual = 0.0;
};

// L_i(sigma) - 1 for every meta-oscillator i. Intermediate values use the
// extended rise-function range, so entries may be NaN far from a root.
std::vector<double> splay_residual(std::span<const double> sigma, const CouplingMatrix& coupling,
                                   const PartialReset& reset, const RiseFunction& u);

// Root of L(sigma, 1) = 1. Returns nullopt only when a converged root has
// some sigma <= 0. Throws NonConvergence otherwise.
std::optional<SplaySolution> solve_splay(const CouplingMatrix& coupling, const PartialReset& reset,
                                         const RiseFunction& u, const SplayOptions& options = {});

// Sorted fixed-point phases from the shifts: phi_1 = 1, phi_i obtained by
// undoing shift and response i-1, ..., 1.
std::vector<double> splay_phases(std::span<const double> sigma, const CouplingMatrix& coupling,
                                 const RiseFunction& u);

// ---- linear stability of the splay state ----

struct StabilityReport {
  std::vector<Eigen::MatrixXd> jacobians;           // one per firing step
  std::vector<std::vector<double>> entries;         // response slopes per step
  Eigen::MatrixXd period_product;
  double ek_bound = 0.0;
  double spectral_radius = 0.0;
  std::optional<double> spectral_radius_dense;      // eigenvalue oracle, n <= 12
  bool stable = false;
};

StabilityReport jacobian_at(const NetworkState& fixed_point, const CouplingMatrix& coupling,
                            const PartialReset& reset, const RiseFunction& u,
                            double fixed_point_tolerance = 1e-9);

// Growth rate lim ||P^k||^(1/k) by normalized repeated squaring.
double spectral_radius_power(const Eigen::MatrixXd& p, double tolerance = 1e-10,
                             std::size_t max_iterations = 100000);
double spectral_radius_dense(const Eigen::MatrixXd& p);

// ---- polynomial root bounds ----

// max_i c_i / c_{i+1} for a polynomial sum_j c_j z^j with positive coefficients.
double ek_root_bound(std::span<const double> coeffs);
// Eigenvalues of the companion matrix. Leading coefficient must be non-zero.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

// ---- cluster invariance bounds ----

struct ClusterBoundTerm {
  int a = 0;
  double early_lhs = 0.0;  // reset spread versus sub-threshold spread, pre-input
  double early_rhs = 0.0;
  double late_lhs = 0.0;   // same comparison after the remaining input
  double late_rhs = 0.0;
  bool early_ok() const { return early_lhs <= early_rhs; }
  bool late_ok() const { return late_lhs <= late_rhs; }
};

struct ClusterBound {
  int a1 = 0;
  bool sufficient_ok = false;
  bool necessary_ok = false;
  bool instability_ok = false;
  std::vector<ClusterBoundTerm> terms;  // a = 1 .. a1 - 1
};

// icpd: sufficient = early condition, necessary = late condition; dcpd swaps
// the roles. Throws ParameterError when the shape is neither.
ClusterBound cluster_bounds(int a1, int n, double eps, const PartialReset& reset,
                            const RiseFunction& u, const ShapeReport& shape,
                            int instability_samples = 200);

// R'(zeta) > U'(U^-1(R(zeta))) / U'(U^-1(1 - (N-1) eps + zeta)) on a grid over
// [(a1-2) eps, (a1-1) eps]. Meaningful for dcpd U.
bool cluster_instability(int a1, int n, double eps, const PartialReset& reset,
                         const RiseFunction& u, int samples = 200);

// Largest linear-reset slope for which the sufficient (resp. necessary)
// condition still holds for a1-clusters. 1 when it holds on all of [0, 1].
struct ResetBounds {
  int a1 = 0;
  double sufficient_c = 0.0;
  double necessary_c = 0.0;
};
ResetBounds linear_reset_bounds(int a1, int n, double eps, const RiseFunction& u,
                                const ShapeReport& shape, int grid = 400, double tol = 1e-10);

// ---- exact bifurcation points for U_b with linear reset ----

// Critical reset slope above which clusters of size >= a lose invariance.
double c_critical(int a, int n, double eps, double b, double tol = 1e-12);
double c_critical_pair(int n, double eps, double b);  // closed form, a = 2
// Left side minus right side of the defining equation; positive below the root.
double c_critical_gap(double c, int a, int n, double eps, double b);

struct BifurcationPoint {
  int a = 0;
  double c_cr = 0.0;
  std::string method;  // "closed-form" or "bisection"
  double residual = 0.0;
};
std::vector<BifurcationPoint> bifurcation_curve(int n, double eps, double b);

// 1 - M(1 - dphi) for an a1-avalanche under U_b and linear reset.
double delta_return_map_ub(double dphi, int a1, int n, double eps, double c, double b);
double delta_return_map_ub_domain(double eps, double b);

// ---- commutation bracket ----

struct CommutationBracket {
  double lower = 0.0;   // whole input first, shifts after
  double middle = 0.0;  // the chain itself
  double upper = 0.0;   // minimal shift first, whole input after
  double sigma_u = 0.0;
};

// Phase-difference images of psi <= phi under the chain and its two
// extremal reorderings.
CommutationBracket commutation_bracket(double phi, double psi, std::span<const ChainStep> chain,
                                       const RiseFunction& u);

}  // namespace pco
