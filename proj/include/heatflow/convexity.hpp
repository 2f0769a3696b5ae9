#pragma once

#include <utility>
#include <vector>

#include "heatflow/functionals.hpp"
#include "heatflow/parallel.hpp"

namespace heatflow {

/// -Hess log rho_t(y) = (I - Cov(X_0 | X_t = y)/t) / t for a point-mass
/// initial model.
Matrix hessian_via_cov(const MixtureModel& initial, double t, const Point& y);

struct LogConcavityReport {
  double t = 0.0;          // heat-flow time carried by the model
  double alpha_hat = 0.0;  // min over the grid of the smallest eigenvalue of -Hess log rho
  double argmin = 0.0;     // axis coordinate of the minimum
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  int grid_count = 0;
  bool is_log_concave = false;  // alpha_hat >= -eigen_tol
};

struct LogConcavityGrid {
  double range = 12.0;  // half-width in standard deviations of the model
  int count = 4096;
  double eigen_tol = 1e-10;
};

/// Scans -(log rho)'' along the center axis over mean +- range * sd, refines
/// the minimum between its grid neighbours by golden-section search, and for
/// n > 1 folds in the orthogonal curvature 1/s.
LogConcavityReport log_concavity_report(const MixtureModel& model,
                                        const LogConcavityGrid& grid = {},
                                        const Execution& exec = {});

/// Smallest t in [t_lo, t_hi] (to bisect_tol) after which the evolved
/// point-mass model is log-concave. The returned time is confirmed on a
/// forward grid up to t_hi; a loss of log-concavity there raises
/// NumericFailure. Throws BracketError when t_lo is already log-concave or
/// t_hi is not.
double time_to_log_concavity(const MixtureModel& initial, double t_lo, double t_hi,
                             double bisect_tol, const LogConcavityGrid& grid = {});

struct ConvexityThresholds {
  bool log_concave_initial = false;  // mutual information convex for all t
  double d_sq = 0.0;                 // squared diameter of the bounded part, or +inf
  double fi_threshold = 0.0;         // J(X_0) M_4(X_0) / n^2, or +inf
  double fi_root_threshold = 0.0;    // upper root of 2n^2 t^2 - t J M_4 - n M_4
  double j0 = 0.0;                   // J(X_0), +inf for atoms
  double m4 = 0.0;                   // M_4(X_0)
  double certified_from = 0.0;       // 0 if log-concave, else min(d_sq, fi_threshold)
};

ConvexityThresholds convexity_thresholds(const MixtureModel& initial,
                                         const QuadratureSpec& spec);

struct ConvexityScan {
  std::vector<double> t_grid;
  std::vector<ErrorEstimate> k_mut;
  std::vector<double> sign_tol;  // max(quadrature error, 1e-9) per point
  /// Maximal runs of grid points with k_mut < -sign_tol, as (first t, last t).
  std::vector<std::pair<double, double>> nonconvex_intervals;
  ConvexityThresholds thresholds;
  /// True when a nonconvex interval reaches past thresholds.certified_from.
  bool threshold_violation = false;
};

ConvexityScan convexity_scan(const MixtureModel& initial, const std::vector<double>& t_grid,
                             const QuadratureSpec& spec, const Execution& exec = {});

/// J^2/n + 2 alpha J: lower bound on K(X;Y) when Y is alpha-log-semiconcave.
double kj_mutual_lower_bound(double j_mut, int n, double alpha);

}  // namespace heatflow
