#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include "csv.hpp"
#include "heatflow/convexity.hpp"
#include "heatflow/errors.hpp"
#include "heatflow/functionals.hpp"

namespace heatflow::app {

namespace {

struct Sample {
  double violation;
  double tolerance;
};

using SampleFn = std::function<Sample(double t)>;

double fd_step(double t, int order) { return std::min(default_fd_step(t, order), t / 4.0); }

// Tolerance for comparing two estimates: twice their summed error bars plus
// a relative floor for estimates that report a zero error.
double combined(double err_a, double err_b, double scale) {
  return 2.0 * (err_a + err_b) + 1e-9 * std::max(1.0, std::abs(scale));
}

CheckResult run_samples(const std::string& name, const std::string& anchor,
                        const std::vector<double>& points, const Execution& exec,
                        const SampleFn& fn) {
  CheckResult r{name, anchor, 0.0, 0.0, CheckStatus::pass, ""};
  std::vector<Sample> samples(points.size());
  const auto errors = try_for_each_index(points.size(), exec, [&](std::size_t i) {
    samples[i] = fn(points[i]);
  });
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const Unsupported& u) {
      return {name, anchor, 0.0, 0.0, CheckStatus::skip, u.what()};
    } catch (const SingularDensity& u) {
      return {name, anchor, 0.0, 0.0, CheckStatus::skip, u.what()};
    }
  }
  double worst_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const double ratio = s.violation / s.tolerance;
    if (std::isnan(ratio) || ratio > worst_ratio) {
      worst_ratio = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
      r.max_violation = std::max(0.0, s.violation);
      r.tolerance = s.tolerance;
      r.note = "worst at t=" + format_real(points[i]);
    }
    if (!(s.violation <= s.tolerance)) r.status = CheckStatus::fail;
  }
  return r;
}

CheckResult skipped(const std::string& name, const std::string& anchor, const std::string& why) {
  return {name, anchor, 0.0, 0.0, CheckStatus::skip, why};
}

double relative(double a, double b, double floor) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace

std::vector<CheckResult> derivative_checks(const MixtureModel& initial, const VerifyOptions& opt) {
  const QuadratureSpec& q = opt.quad;
  auto entropy_at = [&](double t) { return entropy(initial.evolved(t), q).value; };
  auto info_at = [&](double t) { return mutual_functionals(initial, t, q).info.value; };
  std::vector<CheckResult> out;
  out.push_back(run_samples("entropy-first-derivative", "d/dt H(X_t) = J(X_t)/2", opt.t_grid,
                            opt.exec, [&](double t) {
                              const double fd = finite_difference(entropy_at, t, 1, fd_step(t, 1));
                              const double ref = 0.5 * fisher(initial.evolved(t), q).value;
                              return Sample{relative(fd, ref, 1e-300), 1e-4};
                            }));
  out.push_back(run_samples("entropy-second-derivative", "d2/dt2 H(X_t) = -K(X_t)/2", opt.t_grid,
                            opt.exec, [&](double t) {
                              const double fd = finite_difference(entropy_at, t, 2, fd_step(t, 2));
                              const double ref = -0.5 * fisher2(initial.evolved(t), q).value;
                              return Sample{relative(fd, ref, 1e-300), 1e-3};
                            }));
  out.push_back(run_samples("info-first-derivative", "d/dt I(X_0;X_t) = -J(X_0;X_t)/2", opt.t_grid,
                            opt.exec, [&](double t) {
                              const double fd = finite_difference(info_at, t, 1, fd_step(t, 1));
                              const double ref = -0.5 * mutual_functionals(initial, t, q).fisher.value;
                              return Sample{relative(fd, ref, 1e-8), 1e-4};
                            }));
  out.push_back(run_samples("info-second-derivative", "d2/dt2 I(X_0;X_t) = K(X_0;X_t)/2",
                            opt.t_grid, opt.exec, [&](double t) {
                              const double fd = finite_difference(info_at, t, 2, fd_step(t, 2));
                              const double ref = 0.5 * mutual_functionals(initial, t, q).fisher2.value;
                              return Sample{relative(fd, ref, 1e-8), 1e-3};
                            }));
  return out;
}

std::vector<CheckResult> identity_checks(const MixtureModel& initial, const VerifyOptions& opt) {
  const QuadratureSpec& q = opt.quad;
  const int n = initial.dim();
  std::vector<CheckResult> out;

  const std::string hess_name = "hessian-via-posterior-covariance";
  const std::string hess_anchor = "-Hess log rho_t = (I - Cov(X_0|X_t=y)/t)/t";
  if (!initial.is_point_mass()) {
    out.push_back(skipped(hess_name, hess_anchor, "requires a point-mass initial model"));
  } else {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    const MixtureStats st = stats(initial);
    const double log_lo = std::log(opt.t_grid.front());
    const double log_hi = std::log(opt.t_grid.back());
    std::vector<std::pair<double, Point>> draws;
    for (int i = 0; i < opt.hessian_samples; ++i) {
      const double t = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
      const double spread = 1.5 * std::sqrt(st.variance / n + t);
      Point y(n);
      for (int d = 0; d < n; ++d) y(d) = st.mean(d) + spread * normal(rng);
      draws.emplace_back(t, std::move(y));
    }
    std::vector<double> index(draws.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i);
    CheckResult r = run_samples(hess_name, hess_anchor, index, opt.exec, [&](double k) {
      const auto& [t, y] = draws[static_cast<std::size_t>(k)];
      const Matrix via_cov = hessian_via_cov(initial, t, y);
      const Matrix direct = -log_density_hessian(initial.evolved(t), y);
      const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
      return Sample{(via_cov - direct).cwiseAbs().maxCoeff() / scale, 1e-8};
    });
    r.note = std::to_string(draws.size()) + " random (t, y) draws";
    out.push_back(r);
  }

  out.push_back(run_samples("conditional-fisher", "J(X_0|X_t) = J(X_0) + n/t", opt.t_grid, opt.exec,
                            [&](double t) {
                              if (!initial.is_smooth()) throw Unsupported("requires a smooth initial model");
                              const ErrorEstimate lhs = conditional_fisher_by_quadrature(initial, t, q);
                              const double rhs = conditional_fisher(initial, t, q);
                              return Sample{relative(lhs.value, rhs, 1.0), 1e-6};
                            }));
  out.push_back(run_samples("reverse-second-order-fisher", "K(X_t;X_0) = n/t^2 + 2 J(X_0)/t",
                            opt.t_grid, opt.exec, [&](double t) {
                              if (!initial.is_smooth()) throw Unsupported("requires a smooth initial model");
                              const ReverseFisherEstimate est =
                                  reverse_mutual_fisher_by_quadrature(initial, t, q);
                              const ReverseFisher exact = reverse_mutual_fisher(t, initial, q);
                              return Sample{std::max(relative(est.k_rev.value, exact.k_rev, 1.0),
                                                     relative(est.j_rev.value, exact.j_rev, 1.0)),
                                            1e-6};
                            }));
  out.push_back(run_samples("mutual-fisher-equals-backward", "J(X_0;X_t) = Phi(X_0|X_t)", opt.t_grid,
                            opt.exec, [&](double t) {
                              const BackwardInfo b = backward_info(initial, t, q);
                              const ErrorEstimate j = mutual_functionals(initial, t, q).fisher;
                              return Sample{std::abs(b.phi - j.value),
                                            combined(b.var_cond_err / (t * t), j.abs_error, j.value)};
                            }));
  out.push_back(run_samples("i-mmse", "J(X_0;X_t) = Var(X_0|X_t)/t^2", opt.t_grid, opt.exec,
                            [&](double t) {
                              const ErrorEstimate v = conditional_variance(initial, t, q);
                              const ErrorEstimate j = mutual_functionals(initial, t, q).fisher;
                              return Sample{std::abs(v.value / (t * t) - j.value),
                                            combined(v.abs_error / (t * t), j.abs_error, j.value)};
                            }));
  out.push_back(run_samples(
      "k-via-conditional-variance",
      "K(X_0;X_t) = 2 Var(X_0|X_t)/t^3 - E||Cov||_HS^2/t^4", opt.t_grid, opt.exec, [&](double t) {
        const BackwardInfo b = backward_info(initial, t, q);
        const double k = mutual_functionals(initial, t, q).fisher2.value;
        const double first = 2.0 * b.var_cond / (t * t * t);
        const double rhs = first - b.cov_hs_sq / (t * t * t * t);
        return Sample{std::abs(k - rhs) / std::max({std::abs(k), first, 1e-300}), 1e-5};
      }));
  out.push_back(run_samples(
      "k-via-backward-information", "K(X_0;X_t) = Psi + 2 E<-Hess log rho_t, Cov/t^2>",
      opt.t_grid, opt.exec, [&](double t) {
        const BackwardInfo b = backward_info(initial, t, q);
        const ErrorEstimate cross = backward_cross_term(initial, t, q);
        const double k = mutual_functionals(initial, t, q).fisher2.value;
        const double rhs = b.psi + cross.value;
        return Sample{std::abs(k - rhs) / std::max({std::abs(k), b.psi, std::abs(cross.value), 1e-300}),
                      1e-5};
      }));
  return out;
}

std::vector<CheckResult> inequality_checks(const MixtureModel& initial, const VerifyOptions& opt) {
  const QuadratureSpec& q = opt.quad;
  const int n = initial.dim();
  std::vector<CheckResult> out;
  out.push_back(run_samples("second-order-fisher-dominates", "K(X_t) >= J(X_t)^2/n", opt.t_grid,
                            opt.exec, [&](double t) {
                              const MixtureModel m = initial.evolved(t);
                              const ErrorEstimate j = fisher(m, q);
                              const ErrorEstimate k = fisher2(m, q);
                              const double tol = 2.0 * (k.abs_error + 2.0 * j.value * j.abs_error / n) +
                                                 1e-12 * std::max(1.0, k.value);
                              return Sample{j.value * j.value / n - k.value, tol};
                            }));
  out.push_back(run_samples(
      "semiconcavity-lower-bound", "K(X_0;X_t) >= J(X_0;X_t)^2/n + 2 alpha J(X_0;X_t)", opt.t_grid,
      opt.exec, [&](double t) {
        const double alpha = log_concavity_report(initial.evolved(t)).alpha_hat;
        const MutualTriple m = mutual_functionals(initial, t, q);
        const double j = m.fisher.value;
        const double bound = kj_mutual_lower_bound(std::max(j, 0.0), n, alpha);
        const double tol = 2.0 * (m.fisher2.abs_error +
                                  m.fisher.abs_error * (2.0 * std::abs(j) / n + 2.0 * std::abs(alpha))) +
                           1e-9 * std::max(1.0, std::abs(bound));
        return Sample{bound - m.fisher2.value, tol};
      }));
  out.push_back(run_samples("backward-psi-phi", "Psi(X_0|X_t) >= Phi(X_0|X_t)^2/n", opt.t_grid,
                            opt.exec, [&](double t) {
                              const BackwardInfo b = backward_info(initial, t, q);
                              const double t2 = t * t;
                              const double tol = 2.0 * (b.cov_hs_sq_err / (t2 * t2) +
                                                        2.0 * b.phi * b.var_cond_err / (t2 * n)) +
                                                 1e-12 * std::max(1.0, b.psi);
                              return Sample{b.phi * b.phi / n - b.psi, tol};
                            }));
  const double j0 = initial.is_smooth() ? fisher(initial, q).value
                                        : std::numeric_limits<double>::infinity();
  out.push_back(run_samples("conditional-variance-floor", "Var(X_0|X_t) >= n^2/(J(X_0) + n/t)",
                            opt.t_grid, opt.exec, [&](double t) {
                              const ErrorEstimate v = conditional_variance(initial, t, q);
                              const double floor = std::isfinite(j0) ? n * n / (j0 + n / t) : 0.0;
                              return Sample{floor - v.value,
                                            2.0 * v.abs_error + 1e-12 * std::max(1.0, v.value)};
                            }));
  const double m4 = stats(initial).fourth_moment;
  out.push_back(run_samples("covariance-fourth-moment", "E||Cov(X_0|X_t)||_HS^2 <= M_4(X_0)",
                            opt.t_grid, opt.exec, [&](double t) {
                              const BackwardInfo b = backward_info(initial, t, q);
                              return Sample{b.cov_hs_sq - m4,
                                            2.0 * b.cov_hs_sq_err + 1e-12 * std::max(1.0, m4)};
                            }));
  const double d_sq = std::pow(stats(initial).diameter, 2);
  out.push_back(run_samples("bounded-support-curvature", "-Hess log rho_t >= (1 - D^2/t)/t",
                            opt.t_grid, opt.exec, [&](double t) {
                              if (!initial.is_point_mass()) {
                                throw Unsupported("requires a point-mass initial model");
                              }
                              const LogConcavityGrid grid;
                              const double alpha = log_concavity_report(initial.evolved(t), grid).alpha_hat;
                              return Sample{(1.0 - d_sq / t) / t - alpha,
                                            grid.eigen_tol * std::max(1.0, 1.0 / t)};
                            }));
  return out;
}

std::vector<CheckResult> run_suite(const MixtureModel& initial, Suite suite,
                                   const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  auto append = [&](std::vector<CheckResult> more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  if (suite == Suite::identities || suite == Suite::all) append(identity_checks(initial, opt));
  if (suite == Suite::inequalities || suite == Suite::all) append(inequality_checks(initial, opt));
  if (suite == Suite::derivatives || suite == Suite::all) append(derivative_checks(initial, opt));
  return out;
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks) {
    const char* status = c.status == CheckStatus::pass   ? "PASS"
                         : c.status == CheckStatus::fail ? "FAIL"
                                                         : "SKIP";
    char nums[96];
    std::snprintf(nums, sizeof(nums), "max_violation=%.3e  tol=%.3e", c.max_violation,
                  c.tolerance);
    out << status << "  " << c.name << "  [" << c.anchor << "]  " << nums;
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << '\n';
  }
}

bool all_pass(const std::vector<CheckResult>& checks) {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

}  // namespace heatflow::app
