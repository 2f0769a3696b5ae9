// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "checks.hpp"
#include "heatflow/bounds.hpp"
#include "heatflow/convexity.hpp"

using namespace heatflow;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s  [%2d] %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

MixtureModel gaussian(double mean, double var) { return MixtureModel::create_1d({1.0}, {mean}, {var}); }
MixtureModel pair(double a, double s) { return MixtureModel::create_1d({0.5, 0.5}, {-a, a}, {s, s}); }
MixtureModel points(std::vector<double> w, std::vector<double> a) {
  return MixtureModel::create_1d(w, a, std::vector<double>(w.size(), 0.0));
}

double sign_tol(const ErrorEstimate& k) { return std::max(2 * k.abs_error, 1e-9); }

double step(double t, int order) { return std::min(default_fd_step(t, order), t / 4); }

const QuadratureSpec kSpec;

void gaussian_closed_forms() {
  double worst = 0.0;
  for (double var : {0.25, 1.0, 4.0}) {
    const MixtureModel m = gaussian(0.0, var);
    worst = std::max(worst, std::abs(entropy(m, kSpec).value -
                                     0.5 * std::log(2 * std::numbers::pi * std::numbers::e * var)));
    worst = std::max(worst, std::abs(fisher(m, kSpec).value - 1 / var));
    worst = std::max(worst, std::abs(fisher2(m, kSpec).value - 1 / (var * var)));
  }
  report(1, worst < 1e-8, "Gaussian H, J, K closed forms", fmt("max abs error %.3g (tol 1e-8)", worst));
}

void derivative_identities() {
  const MixtureModel m = pair(1.0, 1e-3);
  double h1 = 0.0, i1 = 0.0, h2 = 0.0, i2 = 0.0;
  for (double t : log_grid(0.05, 20.0, 40)) {
    auto h = [&](double s) { return entropy(heat_evolve(m, s), kSpec).value; };
    auto info = [&](double s) { return mutual_functionals(m, s, kSpec).info.value; };
    const MixtureModel mt = heat_evolve(m, t);
    const double j = fisher(mt, kSpec).value;
    const double k = fisher2(mt, kSpec).value;
    const MutualTriple q = mutual_functionals(m, t, kSpec);
    h1 = std::max(h1, std::abs(finite_difference(h, t, 1, step(t, 1)) - 0.5 * j) / (0.5 * j));
    h2 = std::max(h2, std::abs(finite_difference(h, t, 2, step(t, 2)) + 0.5 * k) / (0.5 * k));
    i1 = std::max(i1, std::abs(finite_difference(info, t, 1, step(t, 1)) + 0.5 * q.fisher.value) /
                          std::max(0.5 * q.fisher.value, 1e-8));
    i2 = std::max(i2, std::abs(finite_difference(info, t, 2, step(t, 2)) - 0.5 * q.fisher2.value) /
                          std::max(std::abs(0.5 * q.fisher2.value), 1e-8));
  }
  report(2, h1 < 1e-4 && i1 < 1e-4 && h2 < 1e-3 && i2 < 1e-3, "entropy and information slopes along the flow",
         fmt("first-order rel %.3g / %.3g (tol 1e-4), ", h1, i1) +
             fmt("second-order rel %.3g / %.3g (tol 1e-3)", h2, i2));
}

void closed_form_vs_quadrature() {
  const double s = 1e-3;
  double worst = 0.0;
  for (double u : log_grid(0.01, 100.0, 30)) {
    const MutualTriple c = two_point_closed_form(1.0, 1 / u, kSpec);
    const MutualTriple q = mutual_functionals_by_quadrature(pair(1.0, 0.0), 1 / u, kSpec);
    const MutualTriple gc = two_gaussian_closed_form(1.0, s, 1 / u - s, 1, kSpec);
    const MutualTriple gq = mutual_functionals_by_quadrature(pair(1.0, s), 1 / u - s, kSpec);
    for (const auto& [x, y] : {std::pair{c, q}, std::pair{gc, gq}}) {
      worst = std::max({worst, std::abs(x.info.value - y.info.value), std::abs(x.fisher.value - y.fisher.value),
                        std::abs(x.fisher2.value - y.fisher2.value)});
    }
  }
  report(3, worst < 1e-6, "closed forms against quadrature, u in [0.01, 100]",
         fmt("max abs difference %.3g (tol 1e-6)", worst));
}

// Smallest K_mut + tol over grid points t >= from, and whether any point qualifies.
std::pair<double, int> worst_above(const ConvexityScan& scan, double from) {
  double worst = INFINITY;
  int n = 0;
  for (std::size_t i = 0; i < scan.t_grid.size(); ++i) {
    if (scan.t_grid[i] < from) continue;
    ++n;
    worst = std::min(worst, scan.k_mut[i].value + sign_tol(scan.k_mut[i]));
  }
  return {worst, n};
}

void two_point_scan() {
  const MixtureModel m = points({0.5, 0.5}, {-1, 1});
  const double i0 = two_point_closed_form(1.0, 1e-4, kSpec).info.value;
  const ConvexityScan scan = convexity_scan(m, log_grid(0.01, 10.0, 200), kSpec);
  bool dip = false;
  for (std::size_t i = 0; i < scan.t_grid.size(); ++i) {
    const ErrorEstimate& k = scan.k_mut[i];
    dip |= scan.t_grid[i] < 4.0 && k.value < 0.0 && k.value < -10 * k.abs_error;
  }
  const auto [above, n] = worst_above(scan, 4.0);
  const bool ok = std::abs(i0 - std::log(2.0)) < 1e-4 && dip && n > 0 && above >= 0.0;
  report(4, ok, "two point masses: I -> log 2, K_mut dips below 0 inside (0, 4), K_mut >= 0 for t >= 4",
         fmt("|I(1e-4) - log 2| = %.3g, ", std::abs(i0 - std::log(2.0))) +
             fmt("%.0f nonconvex interval(s), min K_mut + tol on t >= 4: %.3g", double(scan.nonconvex_intervals.size()),
                 above));
}

void two_gaussian_scan() {
  const MixtureModel m = pair(1.0, 1e-3);
  const ConvexityScan scan = convexity_scan(m, log_grid(1e-4, 10.0, 200), kSpec);
  const ErrorEstimate& k0 = scan.k_mut.front();
  bool negative = false;
  for (std::size_t i = 0; i < scan.t_grid.size(); ++i) {
    const double t = scan.t_grid[i];
    negative |= t > 1e-3 && t < 4.0 && scan.k_mut[i].value < -sign_tol(scan.k_mut[i]);
  }
  const double from = std::min(4.0, scan.thresholds.j0 * scan.thresholds.m4);
  const auto [above, n] = worst_above(scan, from);
  const bool ok = k0.value > sign_tol(k0) && negative && n > 0 && above >= 0.0;
  report(5, ok, "two sharp Gaussians: K_mut > 0 at t = 1e-4, dips below 0 in (1e-3, 4), K_mut >= 0 past min(4, J M4)",
         fmt("K_mut(1e-4) = %.4g, threshold %.3g, min K_mut + tol above it: %.3g", k0.value, from, above));
}

void log_concave_inputs() {
  double worst = INFINITY;
  for (const MixtureModel& m : {gaussian(0, 0.25), gaussian(0, 1), gaussian(0, 4), gaussian(3.0, 2.0)}) {
    worst = std::min(worst, worst_above(convexity_scan(m, log_grid(0.01, 10.0, 60), kSpec), 0.0).first);
  }
  report(6, worst >= 0.0, "log-concave inputs: K_mut >= 0 at every scanned t",
         fmt("min K_mut + tol = %.3g", worst));
}

void fisher_moment_certificate() {
  bool ok = true;
  std::string detail;
  for (double s : {0.1, 0.5}) {
    const MixtureModel m = pair(1.0, s);
    const ConvexityThresholds th = convexity_thresholds(m, kSpec);
    const ConvexityScan scan = convexity_scan(m, log_grid(th.fi_threshold, 20 * th.fi_threshold, 30), kSpec);
    const auto [above, n] = worst_above(scan, th.fi_threshold);
    ok = ok && std::isfinite(th.fi_threshold) && n == 30 && above >= 0.0;
    detail += fmt("s=%.1f: J M4 = %.4g, min K_mut + tol = %.3g; ", s, th.fi_threshold, above);
  }
  report(7, ok, "Fisher-moment threshold: K_mut >= 0 for t >= J(X_0) M4(X_0)", detail.substr(0, detail.size() - 2));
}

void concentration_battery() {
  Point u(2);
  u << 0.6, -0.8;
  const std::vector<MixtureModel> battery{
      points({0.5, 0.5}, {-1, 1}),
      points({0.3, 0.7}, {0, 0.5}),
      points({0.2, 0.5, 0.3}, {-2, 0.1, 1}),
      points({1.0 / 3, 1.0 / 3, 1.0 / 3}, {-1, 0, 1}),
      points({0.2, 0.2, 0.2, 0.2, 0.2}, {-2, -1, 0, 1, 2}),
      points({0.1, 0.3, 0.2, 0.15, 0.25}, {-1.5, -0.2, 0.4, 1.1, 3.0}),
      MixtureModel::create(2, {0.5, 0.5}, {u, Point(-u)}, {0.0, 0.0}),
  };
  int valid = 0;
  int bad = 0;
  double worst = -INFINITY;
  for (const MixtureModel& m : battery) {
    const MixtureStats st = stats(m);
    const double cutoff = st.min_separation * st.min_separation / (676 * st.p_inf * st.p_inf);
    int model_valid = 0;
    for (const ConcentrationRow& r : verify_concentration(m, log_grid(cutoff * 1e-3, cutoff * 10, 30))) {
      if (r.skipped) ++bad;
      if (!r.valid) continue;
      ++model_valid;
      // gap >= -2 tol; the gap identity is non-negative by construction.
      if (!(r.gap >= -2 * r.gap_rel_err * std::abs(r.gap)) || !r.holds) ++bad;
      worst = std::max(worst, r.log_gap - r.log_bound);
    }
    bad += model_valid == 0;
    valid += model_valid;
  }
  report(8, bad == 0, "0 <= h(p) - I <= 3(k-1) p_inf exp(-0.085 m^2/t) on 7 point-mass mixtures",
         fmt("%.0f valid points, %.0f violations, max log(gap/bound) = %.4g", valid, bad, worst));
}

void tail_lattice() {
  const std::vector<TailBoundCheck> lattice = tail_bound_lattice();
  int bad = 0;
  double err = 0.0;
  int min_nodes = 1 << 30;
  for (const TailBoundCheck& r : lattice) {
    const double rel = r.lhs_abs_err / std::max(r.lhs, 1.0);
    err = std::max(err, rel);
    min_nodes = std::min(min_nodes, r.nodes);
    if (!r.valid || !r.holds || !(rel < 1e-10) || r.nodes < 200) ++bad;
  }
  report(9, bad == 0 && lattice.size() >= 25, "tail bound on the (b, c) lattice",
         fmt("%.0f points, %.0f violations, ", double(lattice.size()), bad) +
             fmt("max error/max(lhs,1) = %.3g, min nodes %.0f", err, min_nodes));
}

// Runs a check family over several models: no FAIL anywhere and every check
// name passes on at least one model.
void suite(int id, const std::string& what,
           const std::function<std::vector<app::CheckResult>(const MixtureModel&, const app::VerifyOptions&)>& run,
           const std::vector<MixtureModel>& models) {
  app::VerifyOptions opt;
  opt.t_grid = log_grid(0.05, 20.0, 16);
  opt.seed = 7;
  std::map<std::string, int> passes;
  std::vector<std::string> failed;
  for (const MixtureModel& m : models) {
    for (const app::CheckResult& c : run(m, opt)) {
      passes[c.name] += c.status == app::CheckStatus::pass;
      if (c.status == app::CheckStatus::fail) failed.push_back(c.name);
    }
  }
  std::string detail = std::to_string(passes.size()) + " checks";
  for (const auto& [name, n] : passes) {
    if (n == 0) failed.push_back(name + " (never ran)");
  }
  for (const std::string& f : failed) detail += ", failed " + f;
  report(id, failed.empty(), what, detail);
}

void vanishing_derivatives() {
  std::vector<double> ts;
  for (int j = 0; j <= 8; ++j) ts.push_back(0.2 * std::ldexp(1.0, -j));
  const DerivativeVanishingReport r = derivative_vanishing_check(points({0.5, 0.5}, {-1, 1}), ts, kSpec);
  const double jf = std::abs(r.rows.back().j_mut);
  const double kf = std::abs(r.rows.back().k_mut);
  report(12, r.j_shrinks_below_peak && r.k_shrinks_below_peak && jf < 1e-6 && kf < 1e-6,
         "J_mut and K_mut vanish as t -> 0 along t = 0.2 * 2^-j",
         fmt("final |J_mut| = %.3g, |K_mut| = %.3g at t = %.4g", jf, kf, ts.back()));
}

}  // namespace

int main() {
  gaussian_closed_forms();
  derivative_identities();
  closed_form_vs_quadrature();
  two_point_scan();
  two_gaussian_scan();
  log_concave_inputs();
  fisher_moment_certificate();
  concentration_battery();
  tail_lattice();
  const std::vector<MixtureModel> identity_models{points({0.5, 0.5}, {-1, 1}), points({0.2, 0.3, 0.5}, {-1, 0.2, 1.5}),
                                                  pair(1.0, 0.2)};
  suite(10, "identity suite", app::identity_checks, identity_models);
  const std::vector<MixtureModel> battery{points({0.5, 0.5}, {-1, 1}), points({0.2, 0.3, 0.5}, {-1, 0.2, 1.5}),
                                          pair(1.0, 1e-3), pair(1.0, 0.5), gaussian(0.0, 1.0),
                                          MixtureModel::create_1d({0.2, 0.5, 0.3}, {-1, 0.3, 2}, {0.1, 0.4, 0.2})};
  suite(11, "inequality suite", app::inequality_checks, battery);
  vanishing_derivatives();
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
