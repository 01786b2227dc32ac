#pragma once

#include <optional>

#include "pco/rise_function.hpp"

namespace pco {

enum class ShapeMethod { ClosedFormTable, NumericScan };

std::string_view to_string(ShapeMethod method);

// Closed-form property cells for a known family. An empty optional marks a
// cell that cannot be decided from the parameters alone.
struct TableCells {
  std::optional<bool> concave;
  std::optional<bool> convex;
  std::optional<bool> sigmoidal;
  std::optional<bool> icpd;
  std::optional<bool> dcpd;
};

// nullopt for the identity and custom families.
std::optional<TableCells> table_cells(const RiseFunction& u);

struct ClassifyOptions {
  int curvature_points = 1001;
  int phi_points = 50;
  int dphi_points = 50;
  int eps_points = 20;
  double eps_max = 0.5;
  // Slope violations smaller than this, relative to max(1, |slope|), count as zero.
  double scan_tolerance = 1e-7;
  int nonlocal_points = 100;
  double nonlocal_tolerance = 1e-9;
};

// Extremes of d/dphi [H(phi + dphi, eps) - H(phi, eps)] over the scan grid.
struct PhaseDifferenceScan {
  double min_slope = 0.0;
  double max_slope = 0.0;
  bool icpd = false;
  bool dcpd = false;
};

PhaseDifferenceScan scan_phase_difference(const RiseFunction& u, const ClassifyOptions& options = {});

// Third-derivative criterion over 0 <= psi <= phi <= 1. Holding it is
// sufficient for icpd; the reversed inequality is sufficient for dcpd.
struct NonlocalCheck {
  bool icpd_sufficient = false;
  bool dcpd_sufficient = false;
};

NonlocalCheck nonlocal_condition(const RiseFunction& u, const ClassifyOptions& options = {});

struct ShapeReport {
  bool convex = false;
  bool concave = false;
  bool sigmoidal = false;
  bool icpd = false;
  bool dcpd = false;
  ShapeMethod method = ShapeMethod::NumericScan;

  std::optional<TableCells> table;
  PhaseDifferenceScan scan;
  NonlocalCheck nonlocal;
  // Set when a table cell was overruled by the scan (QIF conductance family).
  bool table_overruled = false;
};

// Curvature from the sign of U'' on a grid; icpd/dcpd from the table cells,
// the phase-difference scan and the third-derivative criterion. Throws
// ClassificationConflict when the routes disagree.
ShapeReport classify(const RiseFunction& u, const ClassifyOptions& options = {});

}  // namespace pco
