#pragma once

#include <span>
#include <vector>

#include "heatflow/functionals.hpp"
#include "heatflow/parallel.hpp"

namespace heatflow {

/// 3(k-1) p_inf exp(-0.085 m^2 / t), held as its logarithm.
struct ConcentrationBound {
  double log_bound;
  double bound;  // exp(log_bound); underflows to 0 deep inside the valid region
  bool valid;    // t <= m^2 / (676 p_inf^2)
};

ConcentrationBound concentration_bound(int k, double p_inf, double m, double t);

struct ConcentrationRow {
  double t = 0.0;
  bool valid = false;
  bool skipped = false;  // no one-axis reduction; gap not computed
  double gap = 0.0;      // h(p) - I(X_0;X_t)
  double log_gap = 0.0;
  double gap_rel_err = 0.0;
  double bound = 0.0;
  double log_bound = 0.0;
  double margin = 0.0;  // bound - gap
  /// Upper inequality, decided in log space with the gap lowered by twice
  /// its error. Always true for rows that are invalid or skipped.
  bool holds = true;
};

/// Gap and bound on each grid time for a point-mass initial model with
/// k >= 2 components. Collinear models use the log-space gap identity
///   gap = sum_i p_i E[log(1 + sum_{j != i} (p_j/p_i) e^{-d_ij Z/sqrt(t) - d_ij^2/(2t)})],
/// d_ij the signed axis offset a_i - a_j; other models are skipped.
std::vector<ConcentrationRow> verify_concentration(const MixtureModel& initial,
                                       const std::vector<double>& t_grid,
                                       double rel_tol = 1e-12, const Execution& exec = {});

/// log E[log(1 + sum_j exp(alpha_j + beta_j Z))], Z ~ N(0,1), integrated in
/// log space with composite Gauss-Legendre panels.
LogIntegral log_expect_log1p_sum_exp(std::span<const double> alpha,
                                     std::span<const double> beta, double rel_tol);

struct TailBoundCheck {
  double b = 0.0;
  double c = 0.0;
  double lhs = 0.0;  // E[log(1 + b e^{cZ - c^2/2})]
  double log_lhs = 0.0;
  double lhs_abs_err = 0.0;
  int nodes = 0;
  double rhs = 0.0;  // 3 b e^{-0.085 c^2}
  double log_rhs = 0.0;
  bool valid = false;  // c >= max(1, 26/b)
  bool holds = false;  // log_lhs <= log_rhs
};

TailBoundCheck tail_bound_check(double b, double c, double rel_tol = 1e-12);

/// b in {0.1, 1, 5, 26, 100} against c in {c0, c0+1, c0+2, 2c0, 4c0},
/// c0 = max(1, 26/b); rows ordered by b then c.
std::vector<TailBoundCheck> tail_bound_lattice(double rel_tol = 1e-12,
                                                const Execution& exec = {});

struct DerivativeVanishingRow {
  double t;
  double j_mut;
  double k_mut;
};

struct DerivativeVanishingReport {
  std::vector<DerivativeVanishingRow> rows;  // in the order of t_sequence
  bool j_shrinks_below_peak = false;
  bool k_shrinks_below_peak = false;
  /// J_mut has an interior maximum on a log grid from min(t_sequence) to 100.
  bool rise_then_fall = false;
};

/// Closed-form J_mut and K_mut of a symmetric two-point model along a
/// decreasing time sequence. "Shrinks below peak": after the entry of
/// largest magnitude, magnitudes never increase.
DerivativeVanishingReport derivative_vanishing_check(const MixtureModel& initial,
                                                     const std::vector<double>& t_sequence,
                                                     const QuadratureSpec& spec);

}  // namespace heatflow
