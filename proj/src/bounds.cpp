#include "heatflow/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatflow/errors.hpp"

namespace heatflow {

namespace {

constexpr double kValidityConstant = 676.0;
constexpr double kDecayRate = 0.085;
constexpr double kTailCutoff = 26.0;

}  // namespace

ConcentrationBound concentration_bound(int k, double p_inf, double m, double t) {
  if (k < 2) throw InvalidArgument("concentration_bound: k must be >= 2");
  if (!(p_inf >= 1.0)) throw InvalidArgument("concentration_bound: p_inf must be >= 1");
  if (!(m > 0.0) || !(t > 0.0)) throw InvalidArgument("concentration_bound: m and t must be > 0");
  ConcentrationBound out;
  out.log_bound = std::log(3.0 * (k - 1) * p_inf) - kDecayRate * m * m / t;
  out.bound = std::exp(out.log_bound);
  out.valid = t <= m * m / (kValidityConstant * p_inf * p_inf);
  return out;
}

LogIntegral log_expect_log1p_sum_exp(std::span<const double> alpha,
                                     std::span<const double> beta, double rel_tol) {
  if (alpha.size() != beta.size() || alpha.empty()) {
    throw InvalidArgument("log_expect_log1p_sum_exp: alpha and beta must match and be non-empty");
  }
  std::vector<LogWindow> windows{{0.0, 1.0}};
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (!std::isfinite(alpha[j]) || !std::isfinite(beta[j])) {
      throw InvalidArgument("log_expect_log1p_sum_exp: non-finite coefficient");
    }
    if (beta[j] == 0.0) continue;
    // The softplus switches from exponential to linear where the exponent
    // crosses zero; that kink has width 1/|beta|.
    const double cross = -alpha[j] / beta[j];
    windows.push_back({cross, 1.0 / std::max({1.0, std::abs(cross), std::abs(beta[j])})});
    windows.push_back({beta[j], 1.0});
  }
  std::vector<double> exponents(alpha.size());
  auto log_f = [&](double z) {
    for (std::size_t j = 0; j < alpha.size(); ++j) exponents[j] = alpha[j] + beta[j] * z;
    return log_normal_pdf(z) + log_softplus(log_sum_exp(exponents));
  };
  return log_integrate(log_f, windows, rel_tol);
}

std::vector<ConcentrationRow> verify_concentration(const MixtureModel& initial,
                                       const std::vector<double>& t_grid, double rel_tol,
                                       const Execution& exec) {
  if (!initial.is_point_mass()) throw InvalidArgument("verify_concentration: point-mass initial required");
  if (initial.size() < 2) throw InvalidArgument("verify_concentration: at least two components required");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw InvalidArgument("verify_concentration: times must be > 0");
  }
  const MixtureStats st = stats(initial);
  const int k = static_cast<int>(initial.size());
  const auto proj = project_to_axis(initial);

  std::vector<ConcentrationRow> rows(t_grid.size());
  for_each_index(t_grid.size(), exec, [&](std::size_t r) {
    ConcentrationRow& row = rows[r];
    row.t = t_grid[r];
    const ConcentrationBound b = concentration_bound(k, st.p_inf, st.min_separation, row.t);
    row.valid = b.valid;
    row.bound = b.bound;
    row.log_bound = b.log_bound;
    if (!proj) {
      row.skipped = true;
      return;
    }
    const MixtureModel& line = proj->line_model;
    const std::vector<double>& p = line.weights();
    const double sqrt_t = std::sqrt(row.t);
    std::vector<double> log_terms;
    for (std::size_t i = 0; i < line.size(); ++i) {
      std::vector<double> alpha;
      std::vector<double> beta;
      for (std::size_t j = 0; j < line.size(); ++j) {
        if (j == i) continue;
        const double d = line.centers()[i](0) - line.centers()[j](0);
        alpha.push_back(std::log(p[j] / p[i]) - d * d / (2.0 * row.t));
        beta.push_back(-d / sqrt_t);
      }
      const LogIntegral term = log_expect_log1p_sum_exp(alpha, beta, rel_tol);
      log_terms.push_back(std::log(p[i]) + term.log_value);
      row.gap_rel_err = std::max(row.gap_rel_err, term.rel_error);
    }
    row.log_gap = log_sum_exp(log_terms);
    row.gap = std::exp(row.log_gap);
    row.margin = row.bound - row.gap;
    if (row.valid) {
      row.holds = row.log_gap + std::log1p(-std::min(2.0 * row.gap_rel_err, 0.5)) <= row.log_bound;
    }
  });
  return rows;
}

TailBoundCheck tail_bound_check(double b, double c, double rel_tol) {
  if (!(b > 0.0)) throw InvalidArgument("tail_bound_check: b must be > 0");
  if (!std::isfinite(c)) throw InvalidArgument("tail_bound_check: c must be finite");
  TailBoundCheck out;
  out.b = b;
  out.c = c;
  const double alpha[] = {std::log(b) - 0.5 * c * c};
  const double beta[] = {c};
  const LogIntegral lhs = log_expect_log1p_sum_exp(alpha, beta, rel_tol);
  out.log_lhs = lhs.log_value;
  out.lhs = std::exp(lhs.log_value);
  out.lhs_abs_err = out.lhs * lhs.rel_error;
  out.nodes = lhs.nodes;
  out.log_rhs = std::log(3.0 * b) - kDecayRate * c * c;
  out.rhs = std::exp(out.log_rhs);
  out.valid = c >= std::max(1.0, kTailCutoff / b);
  out.holds = out.log_lhs <= out.log_rhs;
  return out;
}

std::vector<TailBoundCheck> tail_bound_lattice(double rel_tol, const Execution& exec) {
  const double bs[] = {0.1, 1.0, 5.0, 26.0, 100.0};
  std::vector<std::pair<double, double>> points;
  for (double b : bs) {
    const double c0 = std::max(1.0, kTailCutoff / b);
    for (double c : {c0, c0 + 1.0, c0 + 2.0, 2.0 * c0, 4.0 * c0}) points.emplace_back(b, c);
  }
  std::vector<TailBoundCheck> rows(points.size());
  for_each_index(points.size(), exec, [&](std::size_t i) {
    rows[i] = tail_bound_check(points[i].first, points[i].second, rel_tol);
  });
  return rows;
}

namespace {

bool shrinks_below_peak(const std::vector<double>& values) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (std::abs(values[i]) > std::abs(values[peak])) peak = i;
  }
  for (std::size_t i = peak + 1; i < values.size(); ++i) {
    if (std::abs(values[i]) > std::abs(values[i - 1])) return false;
  }
  return true;
}

}  // namespace

DerivativeVanishingReport derivative_vanishing_check(const MixtureModel& initial,
                                                     const std::vector<double>& t_sequence,
                                                     const QuadratureSpec& spec) {
  const auto half_gap_sq = symmetric_pair_half_gap_sq(initial);
  if (!initial.is_point_mass() || !half_gap_sq) {
    throw InvalidArgument("derivative_vanishing_check: symmetric two-point model required");
  }
  if (t_sequence.size() < 2) throw InvalidArgument("derivative_vanishing_check: need >= 2 times");
  for (std::size_t i = 0; i < t_sequence.size(); ++i) {
    if (!(t_sequence[i] > 0.0) || (i > 0 && !(t_sequence[i] < t_sequence[i - 1]))) {
      throw InvalidArgument("derivative_vanishing_check: times must be positive and decreasing");
    }
  }
  DerivativeVanishingReport report;
  std::vector<double> js;
  std::vector<double> ks;
  for (double t : t_sequence) {
    const MutualTriple m = two_point_closed_form(*half_gap_sq, t, spec);
    report.rows.push_back({t, m.fisher.value, m.fisher2.value});
    js.push_back(m.fisher.value);
    ks.push_back(m.fisher2.value);
  }
  report.j_shrinks_below_peak = shrinks_below_peak(js);
  report.k_shrinks_below_peak = shrinks_below_peak(ks);

  constexpr int kProbePoints = 64;
  constexpr double kProbeEnd = 100.0;
  const double t_lo = t_sequence.back();
  if (t_lo < kProbeEnd) {
    std::vector<double> probe;
    for (int i = 0; i < kProbePoints; ++i) {
      const double t = t_lo * std::pow(kProbeEnd / t_lo, static_cast<double>(i) / (kProbePoints - 1));
      probe.push_back(two_point_closed_form(*half_gap_sq, t, spec).fisher.value);
    }
    const auto peak = std::max_element(probe.begin(), probe.end()) - probe.begin();
    report.rise_then_fall = peak > 0 && peak < kProbePoints - 1;
  }
  return report;
}

}  // namespace heatflow
