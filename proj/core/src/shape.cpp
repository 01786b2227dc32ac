#include "pco/shape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pco/error.hpp"

namespace pco {

std::string_view to_string(ShapeMethod method) {
  switch (method) {
    case ShapeMethod::ClosedFormTable: return "closed-form-table";
    case ShapeMethod::NumericScan: return "numeric-scan";
  }
  return "unknown";
}

std::optional<TableCells> table_cells(const RiseFunction& u) {
  const RiseParams& p = u.params();
  TableCells t;
  switch (u.family()) {
    case RiseFamily::Ub:
      // U_b'' has the sign of -b.
      t.convex = p.b < 0.0;
      t.concave = p.b > 0.0;
      t.sigmoidal = false;
      t.icpd = true;
      t.dcpd = true;
      return t;
    case RiseFamily::LIF:
      t.concave = true;
      t.convex = false;
      t.sigmoidal = false;
      t.icpd = true;
      t.dcpd = false;
      return t;
    case RiseFamily::LIFConductance:
      t.concave = p.e_syn >= p.e_eq;
      t.convex = p.e_syn <= p.e_eq;
      t.sigmoidal = false;
      t.icpd = p.e_syn >= p.e_eq;
      t.dcpd = p.e_syn <= p.e_eq;
      return t;
    case RiseFamily::QIF:
      t.concave = p.beta == 0.0;
      t.convex = p.alpha == 0.0;
      t.sigmoidal = p.beta < 0.0 && p.alpha > 0.0;
      t.icpd = false;
      t.dcpd = p.alpha <= 1.0 && p.beta >= -1.0;
      return t;
    case RiseFamily::QIFConductance: {
      const double eta = p.e_syn * (p.alpha - p.beta);
      const bool convex = 0.0 <= 1.0 + p.alpha * (p.alpha - 2.0 * eta);
      t.concave = false;
      t.convex = convex;
      t.sigmoidal = !convex;
      t.icpd = false;
      // Evaluated as typeset; 1/0 follows IEEE semantics at alpha = 0 or beta = 0.
      const bool alpha_ok = p.alpha * p.alpha <= eta / (eta - p.alpha - 1.0 / p.alpha);
      const bool beta_ok = p.beta * p.beta <= (eta - p.alpha + p.beta) / (eta - p.alpha - 1.0 / p.beta);
      t.dcpd = alpha_ok && beta_ok;
      return t;
    }
    case RiseFamily::Identity:
    case RiseFamily::Custom:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// d/dx H(x, eps) = U'(x) / U'(H(x, eps)).
double response_slope(const RiseFunction& u, double x, double eps) {
  const double h = u.inverse(std::min(1.0, u(x) + eps));
  return u.d1(x) / u.d1(h);
}

struct Curvature {
  bool convex;
  bool concave;
  bool sigmoidal;
};

Curvature curvature(const RiseFunction& u, int points) {
  std::vector<double> d2(static_cast<std::size_t>(points));
  double scale = 0.0;
  double slope_scale = 0.0;
  for (int k = 0; k < points; ++k) {
    const double phi = static_cast<double>(k) / (points - 1);
    d2[static_cast<std::size_t>(k)] = u.d2(phi);
    scale = std::max(scale, std::abs(d2[static_cast<std::size_t>(k)]));
    slope_scale = std::max(slope_scale, std::abs(u.d1(phi)));
  }
  if (scale <= 1e-12 * slope_scale) return {true, true, false};
  const double tol = 1e-9 * scale;
  bool convex = true;
  bool concave = true;
  int sign_changes = 0;
  int last_sign = 0;
  for (double v : d2) {
    if (v < -tol) convex = false;
    if (v > tol) concave = false;
    const int sign = v > tol ? 1 : (v < -tol ? -1 : 0);
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) ++sign_changes;
      last_sign = sign;
    }
  }
  return {convex, concave, !convex && !concave && sign_changes == 1};
}

void compare_cell(const char* cell, std::optional<bool> table, bool numeric, bool scan_authoritative,
                  const RiseFunction& u, bool& overruled) {
  if (!table.has_value() || *table == numeric) return;
  if (scan_authoritative) {
    overruled = true;
    return;
  }
  throw ClassificationConflict(u.name() + ": closed-form " + cell + " = " +
                               (*table ? "true" : "false") + " but numeric scan gives " +
                               (numeric ? "true" : "false"));
}

}  // namespace

PhaseDifferenceScan scan_phase_difference(const RiseFunction& u, const ClassifyOptions& options) {
  PhaseDifferenceScan scan;
  scan.min_slope = 0.0;
  scan.max_slope = 0.0;
  bool icpd = true;
  bool dcpd = true;
  for (int ke = 1; ke <= options.eps_points; ++ke) {
    const double eps = options.eps_max * ke / options.eps_points;
    const double top = u.inverse(1.0 - eps);
    for (int ip = 0; ip < options.phi_points; ++ip) {
      const double phi = top * ip / (options.phi_points - 1);
      const double base = response_slope(u, phi, eps);
      for (int jd = 1; jd < options.dphi_points; ++jd) {
        const double dphi = (top - phi) * jd / (options.dphi_points - 1);
        const double shifted = response_slope(u, phi + dphi, eps);
        const double slope = shifted - base;
        const double tol = options.scan_tolerance * std::max({1.0, std::abs(base), std::abs(shifted)});
        scan.min_slope = std::min(scan.min_slope, slope);
        scan.max_slope = std::max(scan.max_slope, slope);
        if (slope < -tol) icpd = false;
        if (slope > tol) dcpd = false;
      }
    }
  }
  scan.icpd = icpd;
  scan.dcpd = dcpd;
  return scan;
}

NonlocalCheck nonlocal_condition(const RiseFunction& u, const ClassifyOptions& options) {
  bool icpd = true;
  bool dcpd = true;
  const int n = options.nonlocal_points;
  for (int i = 0; i < n; ++i) {
    const double phi = static_cast<double>(i) / (n - 1);
    const double u1 = u.d1(phi);
    const double u2 = u.d2(phi);
    const double u3 = u.d3(phi);
    const double local = 3.0 * u2 * u2 / u1;
    for (int j = 0; j <= i; ++j) {
      const double psi = static_cast<double>(j) / (n - 1);
      const double v1 = u.d1(psi);
      const double rhs = local - u.d2(psi) * u2 * u1 / (v1 * v1);
      const double tol = options.nonlocal_tolerance * std::max({1.0, std::abs(u3), std::abs(rhs)});
      if (u3 > rhs + tol) icpd = false;
      if (u3 < rhs - tol) dcpd = false;
    }
  }
  return {icpd, dcpd};
}

ShapeReport classify(const RiseFunction& u, const ClassifyOptions& options) {
  ShapeReport report;
  const Curvature c = curvature(u, options.curvature_points);
  report.convex = c.convex;
  report.concave = c.concave;
  report.sigmoidal = c.sigmoidal;

  report.scan = scan_phase_difference(u, options);
  report.nonlocal = nonlocal_condition(u, options);
  if (report.nonlocal.icpd_sufficient && !report.scan.icpd) {
    throw ClassificationConflict(u.name() + ": third-derivative criterion certifies icpd but the scan does not");
  }
  if (report.nonlocal.dcpd_sufficient && !report.scan.dcpd) {
    throw ClassificationConflict(u.name() + ": third-derivative criterion certifies dcpd but the scan does not");
  }
  report.icpd = report.scan.icpd;
  report.dcpd = report.scan.dcpd;

  report.table = table_cells(u);
  if (report.table) {
    const bool scan_authoritative = u.family() == RiseFamily::QIFConductance;
    bool overruled = false;
    const TableCells& t = *report.table;
    // Identity-like members (e.g. E_syn = E_eq) are both convex and concave.
    if (!(report.convex && report.concave)) {
      compare_cell("concave", t.concave, report.concave, scan_authoritative, u, overruled);
      compare_cell("convex", t.convex, report.convex, scan_authoritative, u, overruled);
      compare_cell("sigmoidal", t.sigmoidal, report.sigmoidal, scan_authoritative, u, overruled);
    }
    compare_cell("icpd", t.icpd, report.icpd, scan_authoritative, u, overruled);
    compare_cell("dcpd", t.dcpd, report.dcpd, scan_authoritative, u, overruled);
    report.table_overruled = overruled;
    report.method = overruled ? ShapeMethod::NumericScan : ShapeMethod::ClosedFormTable;
  }
  return report;
}

}  // namespace pco
