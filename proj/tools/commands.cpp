#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "checks.hpp"
#include "csv.hpp"
#include "heatflow/bounds.hpp"
#include "heatflow/convexity.hpp"
#include "heatflow/errors.hpp"
#include "heatflow/kernels.hpp"
#include "svg.hpp"

namespace heatflow::app {

namespace {

std::string path_in(const CommandContext& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

std::ofstream open_output(const CommandContext& ctx, const std::string& name) {
  const std::string path = path_in(ctx, name);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  return f;
}

// Echoes report text to the console and, when requested, to a file.
class Report {
 public:
  explicit Report(const CommandContext& ctx) : ctx_(ctx) {}
  template <class T>
  Report& operator<<(const T& v) {
    buf_ << v;
    return *this;
  }
  void finish(const std::string& file_name) {
    ctx_.out << buf_.str();
    if (ctx_.config.wants("report")) open_output(ctx_, file_name) << buf_.str();
  }

 private:
  const CommandContext& ctx_;
  std::ostringstream buf_;
};

struct ScanRow {
  double t = 0.0;
  MutualTriple m;
  double di_fd = 0.0;
  double d2i_fd = 0.0;
};

double fd_step(double t, int order) { return std::min(default_fd_step(t, order), t / 4.0); }

// K_mut >= -max(2 err, 1e-9) on every point of the grid.
struct Confirmation {
  bool ok = true;
  double min_k = std::numeric_limits<double>::infinity();
  double at = 0.0;
  std::size_t points = 0;
};

Confirmation confirm_convex(const MixtureModel& model, const std::vector<double>& grid,
                            const QuadratureSpec& q, const Execution& exec) {
  Confirmation c;
  const MutualScan scan = scan_mutual(model, grid, q, exec);
  if (!scan.ok()) std::rethrow_exception(scan.errors[scan.first_failure()]);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ErrorEstimate& k = scan.values[i].fisher2;
    if (k.value < c.min_k) {
      c.min_k = k.value;
      c.at = grid[i];
    }
    if (k.value < -std::max(2.0 * k.abs_error, 1e-9)) c.ok = false;
  }
  c.points = grid.size();
  return c;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return g;
}

}  // namespace

std::string describe_model(const MixtureModel& model) {
  std::ostringstream os;
  os << "k=" << model.size() << " n=" << model.dim() << ' '
     << (model.is_point_mass() ? "point masses"
         : model.is_smooth()   ? "gaussian components"
                               : "mixed atoms and gaussians");
  os << " weights=";
  for (std::size_t i = 0; i < model.size(); ++i) os << (i ? "," : "") << format_real(model.weights()[i]);
  return os.str();
}

int cmd_scan(const CommandContext& ctx) {
  const ScanConfig& cfg = ctx.config;
  const MixtureModel& model = ctx.model;
  const std::vector<double> grid = cfg.t_grid();
  auto info_at = [&](double t) { return mutual_functionals(model, t, cfg.quad).info.value; };

  std::vector<ScanRow> rows(grid.size());
  const auto errors = try_for_each_index(grid.size(), ctx.exec, [&](std::size_t i) {
    ScanRow& r = rows[i];
    r.t = grid[i];
    r.m = mutual_functionals(model, r.t, cfg.quad);
    r.di_fd = finite_difference(info_at, r.t, 1, fd_step(r.t, 1));
    r.d2i_fd = finite_difference(info_at, r.t, 2, fd_step(r.t, 2));
  });
  std::size_t done = 0;
  while (done < rows.size() && !errors[done]) ++done;

  if (cfg.wants("csv")) {
    std::ofstream f = open_output(ctx, "scan.csv");
    CsvWriter csv(f, {"t", "I", "J_mut", "K_mut", "I_err", "J_err", "K_err", "dI_fd", "d2I_fd"});
    for (std::size_t i = 0; i < done; ++i) {
      const ScanRow& r = rows[i];
      csv.row({format_real(r.t), format_real(r.m.info.value), format_real(r.m.fisher.value),
               format_real(r.m.fisher2.value), format_real(r.m.info.abs_error),
               format_real(r.m.fisher.abs_error), format_real(r.m.fisher2.abs_error),
               format_real(r.di_fd), format_real(r.d2i_fd)});
    }
    if (done < rows.size()) csv.mark_incomplete();
  }
  if (done < rows.size()) std::rethrow_exception(errors[done]);

  if (cfg.wants("svg")) {
    std::vector<double> i_vals;
    std::vector<double> j_vals;
    std::vector<double> k_vals;
    for (const ScanRow& r : rows) {
      i_vals.push_back(r.m.info.value);
      j_vals.push_back(r.m.fisher.value);
      k_vals.push_back(r.m.fisher2.value);
    }
    open_output(ctx, "scan.svg") << render_stacked_panels(
        "Mutual information along the heat flow", grid,
        {{"I(X_0;X_t)", i_vals}, {"J(X_0;X_t)", j_vals}, {"K(X_0;X_t)", k_vals}},
        cfg.t_spacing == Spacing::log);
  }

  Report report(ctx);
  report << "model: " << describe_model(model) << '\n';
  report << "grid: " << grid.size() << " points in [" << format_real(cfg.t_min) << ", "
         << format_real(cfg.t_max) << "]\n";
  bool in_run = false;
  int intervals = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ErrorEstimate& k = rows[i].m.fisher2;
    const bool negative = k.value < -std::max(k.abs_error, 1e-9);
    if (negative && !in_run) {
      report << "nonconvex from t=" << format_real(rows[i].t);
      ++intervals;
    }
    if (!negative && in_run) report << " to t=" << format_real(rows[i - 1].t) << '\n';
    in_run = negative;
  }
  if (in_run) report << " to t=" << format_real(rows.back().t) << '\n';
  if (intervals == 0) report << "no nonconvex interval on the grid\n";
  report.finish("scan_report.txt");
  return kSuccess;
}

int cmd_verify(const CommandContext& ctx) {
  VerifyOptions opt;
  opt.t_grid = ctx.config.t_grid();
  opt.quad = ctx.config.quad;
  opt.seed = ctx.config.seed;
  opt.exec = ctx.exec;
  const std::vector<CheckResult> checks = run_suite(ctx.model, ctx.config.suite, opt);
  Report report(ctx);
  report << "model: " << describe_model(ctx.model) << '\n';
  std::ostringstream lines;
  print_checks(lines, checks);
  report << lines.str();
  const bool ok = all_pass(checks);
  report << (ok ? "all checks passed\n" : "some checks FAILED\n");
  report.finish("verify_report.txt");
  return ok ? kSuccess : kCheckFailure;
}

int cmd_thresholds(const CommandContext& ctx) {
  const MixtureModel& model = ctx.model;
  const QuadratureSpec& q = ctx.config.quad;
  const ConvexityThresholds th = convexity_thresholds(model, q);
  Report report(ctx);
  report << "model: " << describe_model(model) << '\n';

  std::vector<double> thresholds;
  if (th.log_concave_initial) {
    report << "log-concave initial law: convex for all t > 0\n";
    thresholds.push_back(0.0);
  }
  if (std::isfinite(th.d_sq) && !(model.size() == 1)) {
    report << (model.is_point_mass() ? "bounded support" : "bounded part convolved with a gaussian")
           << ", D^2 = " << format_real(th.d_sq) << ": convex for t >= " << format_real(th.d_sq)
           << '\n';
    thresholds.push_back(th.d_sq);
  }
  if (std::isfinite(th.fi_threshold)) {
    report << "Fisher-moment bound, J(X_0)=" << format_real(th.j0) << " M_4(X_0)=" << format_real(th.m4)
           << ": J M_4/n^2 = " << format_real(th.fi_threshold) << ", convex for t >= "
           << format_real(th.fi_threshold) << " (root of 2n^2 t^2 - t J M_4 - n M_4: "
           << format_real(th.fi_root_threshold) << ")\n";
    thresholds.push_back(th.fi_threshold);
  }
  if (thresholds.empty()) {
    report << "no convexity threshold applies to this model\n";
  } else {
    report << "certified convex for t >= " << format_real(th.certified_from) << '\n';
  }
  if (model.is_point_mass() && model.size() > 1 && std::isfinite(th.d_sq)) {
    try {
      const double t_star = time_to_log_concavity(model, 1e-4 * th.d_sq, th.d_sq, 1e-8 * th.d_sq);
      report << "time to log-concavity: " << format_real(t_star) << " (upper bound D^2 = "
             << format_real(th.d_sq) << ")\n";
    } catch (const BracketError&) {
    } catch (const Unsupported&) {
    }
  }

  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  bool ok = true;
  constexpr int kConfirmPoints = 24;
  for (double from : thresholds) {
    std::vector<double> grid;
    if (from == 0.0) {
      grid = ctx.config.t_grid();
    } else {
      grid = log_grid(from, std::max(50.0 * from, ctx.config.t_max), kConfirmPoints);
    }
    const Confirmation c = confirm_convex(model, grid, q, ctx.exec);
    ok = ok && c.ok;
    report << (c.ok ? "PASS" : "FAIL") << "  K(X_0;X_t) >= 0 for t in [" << format_real(grid.front())
           << ", " << format_real(grid.back()) << "] on " << c.points
           << " points, min K_mut = " << format_real(c.min_k) << " at t=" << format_real(c.at) << '\n';
  }
  report.finish("thresholds_report.txt");
  return ok ? kSuccess : kCheckFailure;
}

int cmd_bounds(const CommandContext& ctx) {
  const MixtureModel& model = ctx.model;
  Report report(ctx);
  report << "model: " << describe_model(model) << '\n';
  bool ok = true;

  if (model.is_point_mass() && model.size() >= 2) {
    const std::vector<ConcentrationRow> rows = verify_concentration(model, ctx.config.t_grid(), 1e-12, ctx.exec);
    if (ctx.config.wants("csv")) {
      std::ofstream f = open_output(ctx, "concentration.csv");
      CsvWriter csv(f, {"t", "valid", "gap", "bound", "margin"});
      for (const ConcentrationRow& r : rows) {
        csv.row({format_real(r.t), r.valid ? "true" : "false",
                 r.skipped ? "nan" : format_real(r.gap), format_real(r.bound),
                 r.skipped ? "nan" : format_real(r.margin)});
      }
    }
    int valid = 0;
    int skipped = 0;
    int failed = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const ConcentrationRow& r : rows) {
      if (r.skipped) {
        ++skipped;
        continue;
      }
      if (!r.valid) continue;
      ++valid;
      if (!r.holds) ++failed;
      worst = std::max(worst, r.log_gap - r.log_bound);
    }
    ok = ok && failed == 0;
    report << (failed == 0 ? "PASS" : "FAIL") << "  0 <= h(p) - I <= 3(k-1) p_inf exp(-0.085 m^2/t): "
           << valid << " valid points, " << failed << " violations";
    if (valid > 0) report << ", max log(gap/bound) = " << format_real(worst);
    report << '\n';
    if (skipped > 0) {
      report << "SKIP  " << skipped << " points: gap needs collinear centers\n";
    }
  } else {
    report << "SKIP  concentration bound: needs a point-mass model with k >= 2\n";
  }

  const std::vector<TailBoundCheck> lattice = tail_bound_lattice(1e-12, ctx.exec);
  if (ctx.config.wants("csv")) {
    std::ofstream f = open_output(ctx, "lattice.csv");
    CsvWriter csv(f, {"b", "c", "lhs", "rhs", "valid"});
    for (const TailBoundCheck& r : lattice) {
      csv.row({format_real(r.b), format_real(r.c), format_real(r.lhs), format_real(r.rhs),
               r.valid ? "true" : "false"});
    }
  }
  int lattice_fail = 0;
  for (const TailBoundCheck& r : lattice) {
    if (r.valid && (!r.holds || !(r.lhs_abs_err < 1e-10 * std::max(r.lhs, 1.0)))) ++lattice_fail;
  }
  ok = ok && lattice_fail == 0;
  report << (lattice_fail == 0 ? "PASS" : "FAIL")
         << "  E[log(1 + b e^{cZ - c^2/2})] <= 3b e^{-0.085 c^2}: " << lattice.size()
         << " lattice points, " << lattice_fail << " violations\n";

  if (model.is_point_mass() && symmetric_pair_half_gap_sq(model)) {
    std::vector<double> ts;
    for (int j = 0; j <= 8; ++j) ts.push_back(0.2 * std::ldexp(1.0, -j));
    const DerivativeVanishingReport dv = derivative_vanishing_check(model, ts, ctx.config.quad);
    const bool dv_ok = dv.j_shrinks_below_peak && dv.k_shrinks_below_peak && dv.rise_then_fall;
    ok = ok && dv_ok;
    report << (dv_ok ? "PASS" : "FAIL") << "  J(X_0;X_t), K(X_0;X_t) -> 0 as t -> 0: final J="
           << format_real(dv.rows.back().j_mut) << " K=" << format_real(dv.rows.back().k_mut)
           << " at t=" << format_real(dv.rows.back().t)
           << (dv.rise_then_fall ? ", J rises then falls" : ", no interior maximum of J") << '\n';
  }
  report.finish("bounds_report.txt");
  return ok ? kSuccess : kCheckFailure;
}

}  // namespace heatflow::app
