#include "heatflow/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "heatflow/errors.hpp"
#include "heatflow/kernels.hpp"

namespace heatflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum of -(log rho)'' on [lo, hi] as (value, location).
std::pair<double, double> golden_min(const MixtureModel& line, double lo, double hi) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  auto alpha = [&](double y) { return -local_log_density_1d(line, y).hessian; };
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = alpha(c);
  double fd = alpha(d);
  for (int it = 0; it < 80 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = alpha(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = alpha(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return std::min({std::pair{fc, c}, std::pair{fd, d}, std::pair{alpha(mid), mid}});
}

}  // namespace

Matrix hessian_via_cov(const MixtureModel& initial, double t, const Point& y) {
  const Matrix cov = conditional_cov(initial, t, y);
  const int n = initial.dim();
  return (Matrix::Identity(n, n) - cov / t) / t;
}

LogConcavityReport log_concavity_report(const MixtureModel& model,
                                        const LogConcavityGrid& grid,
                                        const Execution& exec) {
  if (grid.count < 16) throw InvalidArgument("log_concavity_report: grid_count must be >= 16");
  if (!(grid.range > 0.0)) throw InvalidArgument("log_concavity_report: grid range must be > 0");
  if (!model.is_smooth()) {
    throw SingularDensity("log_concavity_report requires every variance > 0");
  }
  const auto proj = project_to_axis(model);
  if (!proj) {
    throw Unsupported("log_concavity_report: n > 1 requires collinear centers and a shared variance");
  }
  const MixtureModel& line = proj->line_model;
  const MixtureStats st = stats(line);
  const double mean = st.mean(0);
  const double sd = std::sqrt(st.variance);

  LogConcavityReport report;
  report.t = model.elapsed();
  report.grid_lo = mean - grid.range * sd;
  report.grid_hi = mean + grid.range * sd;
  report.grid_count = grid.count;

  std::vector<double> ys(static_cast<std::size_t>(grid.count));
  const double step = (report.grid_hi - report.grid_lo) / (grid.count - 1);
  for (int i = 0; i < grid.count; ++i) ys[static_cast<std::size_t>(i)] = report.grid_lo + i * step;
  const std::vector<double> alpha = log_concavity_profile(line, ys, exec);

  const auto it = std::min_element(alpha.begin(), alpha.end());
  const std::size_t j = static_cast<std::size_t>(it - alpha.begin());
  const double lo = ys[j == 0 ? 0 : j - 1];
  const double hi = ys[std::min(j + 1, ys.size() - 1)];
  const auto [refined, at] = golden_min(line, lo, hi);
  report.alpha_hat = *it;
  report.argmin = ys[j];
  if (refined < report.alpha_hat) {
    report.alpha_hat = refined;
    report.argmin = at;
  }
  if (proj->orth_dims > 0) {
    report.alpha_hat = std::min(report.alpha_hat, 1.0 / proj->shared_variance);
  }
  report.is_log_concave = report.alpha_hat >= -grid.eigen_tol;
  return report;
}

double time_to_log_concavity(const MixtureModel& initial, double t_lo, double t_hi,
                             double bisect_tol, const LogConcavityGrid& grid) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
    throw InvalidArgument("time_to_log_concavity: need 0 < t_lo < t_hi");
  }
  if (!(bisect_tol > 0.0)) throw InvalidArgument("time_to_log_concavity: bisect_tol must be > 0");
  auto concave_at = [&](double t) {
    return log_concavity_report(initial.evolved(t), grid).is_log_concave;
  };
  if (concave_at(t_lo)) {
    throw BracketError("time_to_log_concavity: already log-concave at t_lo");
  }
  if (!concave_at(t_hi)) {
    throw BracketError("time_to_log_concavity: not log-concave at t_hi");
  }
  double lo = t_lo;
  double hi = t_hi;
  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    (concave_at(mid) ? hi : lo) = mid;
  }
  constexpr int kConfirmPoints = 16;
  for (int i = 1; i <= kConfirmPoints; ++i) {
    const double t = hi + (t_hi - hi) * i / kConfirmPoints;
    if (!concave_at(t)) {
      std::ostringstream os;
      os << "time_to_log_concavity: log-concavity lost again at t=" << t;
      throw NumericFailure(os.str(), t);
    }
  }
  return hi;
}

ConvexityThresholds convexity_thresholds(const MixtureModel& initial,
                                         const QuadratureSpec& spec) {
  const MixtureStats st = stats(initial);
  const int n = initial.dim();
  ConvexityThresholds th;

  const bool shared = initial.has_shared_variance();
  const double s = initial.variances().front();
  th.d_sq = shared ? st.center_diameter * st.center_diameter : kInf;
  // A single component, or a shared-variance mixture already past its
  // time to log-concavity (s >= D^2), is log-concave.
  th.log_concave_initial =
      initial.size() == 1 || (shared && s > 0.0 && th.d_sq <= s);

  th.m4 = st.fourth_moment;
  th.j0 = kInf;
  if (initial.is_smooth()) {
    try {
      th.j0 = fisher(initial, spec).value;
    } catch (const Unsupported&) {
      th.j0 = kInf;
    }
  }
  if (std::isfinite(th.j0)) {
    const double n2 = static_cast<double>(n) * n;
    th.fi_threshold = th.j0 * th.m4 / n2;
    th.fi_root_threshold =
        th.j0 * th.m4 / (4.0 * n2) *
        (1.0 + std::sqrt(1.0 + 8.0 * n / (th.j0 * th.j0 * th.m4)));
  } else {
    th.fi_threshold = kInf;
    th.fi_root_threshold = kInf;
  }
  th.certified_from = th.log_concave_initial ? 0.0 : std::min(th.d_sq, th.fi_threshold);
  return th;
}

ConvexityScan convexity_scan(const MixtureModel& initial, const std::vector<double>& t_grid,
                             const QuadratureSpec& spec, const Execution& exec) {
  if (t_grid.empty()) throw InvalidArgument("convexity_scan: empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw InvalidArgument("convexity_scan: time grid must be positive and increasing");
    }
  }
  const MutualScan mutual = scan_mutual(initial, t_grid, spec, exec);
  if (!mutual.ok()) std::rethrow_exception(mutual.errors[mutual.first_failure()]);

  ConvexityScan scan;
  scan.t_grid = t_grid;
  scan.thresholds = convexity_thresholds(initial, spec);
  bool in_run = false;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const ErrorEstimate k = mutual.values[i].fisher2;
    const double tol = std::max(k.abs_error, 1e-9);
    scan.k_mut.push_back(k);
    scan.sign_tol.push_back(tol);
    if (k.value < -tol) {
      if (!in_run) scan.nonconvex_intervals.emplace_back(t_grid[i], t_grid[i]);
      scan.nonconvex_intervals.back().second = t_grid[i];
      in_run = true;
    } else {
      in_run = false;
    }
  }
  for (const auto& [lo, hi] : scan.nonconvex_intervals) {
    if (hi >= scan.thresholds.certified_from) scan.threshold_violation = true;
  }
  return scan;
}

double kj_mutual_lower_bound(double j_mut, int n, double alpha) {
  if (!(j_mut >= 0.0)) throw InvalidArgument("kj_mutual_lower_bound: j_mut must be >= 0");
  if (n < 1) throw InvalidArgument("kj_mutual_lower_bound: n must be >= 1");
  return j_mut * j_mut / n + 2.0 * alpha * j_mut;
}

}  // namespace heatflow
