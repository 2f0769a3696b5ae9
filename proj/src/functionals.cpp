#include "heatflow/functionals.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "heatflow/errors.hpp"

namespace heatflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AxisProjection reduce_or_throw(const MixtureModel& model, const char* what) {
  auto proj = project_to_axis(model);
  if (!proj) {
    throw Unsupported(std::string(what) +
                      ": n > 1 requires collinear centers and a shared variance");
  }
  return *std::move(proj);
}

std::vector<double> line_centers(const MixtureModel& line) {
  std::vector<double> c(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) c[i] = line.centers()[i](0);
  return c;
}

std::vector<double> line_scales(const MixtureModel& line) {
  std::vector<double> s(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) s[i] = std::sqrt(line.variances()[i]);
  return s;
}

// Integral of rho(y) * g(local log-density at y, y) for a smooth 1-D model.
template <class G>
ErrorEstimate integrate_against_density(const MixtureModel& line, G&& g,
                                        const QuadratureSpec& spec) {
  const auto centers = line_centers(line);
  const auto scales = line_scales(line);
  auto integrand = [&](double y) {
    const LocalLogDensity l = local_log_density_1d(line, y);
    const double rho = std::exp(l.log_rho);
    return rho == 0.0 ? 0.0 : rho * g(l, y);
  };
  return integrate_over_components(integrand, centers, scales, spec);
}

void require_smooth(const MixtureModel& model, const char* what) {
  if (!model.is_smooth()) {
    throw SingularDensity(std::string(what) + " requires every variance > 0");
  }
}

void require_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidArgument(std::string(what) + ": t must be finite and > 0");
  }
}

void require_floor(const MixtureModel& initial, double t, const char* what) {
  if (!initial.is_smooth() && t < kPointMassTimeFloor) {
    throw InvalidArgument(std::string(what) +
                          ": t below the point-mass quadrature floor 1e-6");
  }
}

// Posterior over the components of `initial` (a 1-D model) given X_t = y,
// with the within-component posterior mean and variance of X_0.
struct LinePosterior {
  double log_rho;
  double mean;
  double variance;
};

LinePosterior line_posterior(const MixtureModel& initial_line,
                             const MixtureModel& evolved_line, double t, double y) {
  const std::size_t k = evolved_line.size();
  std::vector<double> logits(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double d = y - evolved_line.centers()[i](0);
    logits[i] = evolved_line.log_normalizers()[i] -
                d * d / (2.0 * evolved_line.variances()[i]);
  }
  const double lse = log_sum_exp(logits);
  std::vector<double> w(k), m(k), v(k);
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = std::exp(logits[i] - lse);
    const double a = initial_line.centers()[i](0);
    const double s = initial_line.variances()[i];
    m[i] = a + s / (s + t) * (y - a);
    v[i] = s * t / (s + t);
    mean += w[i] * m[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = m[i] - mean;
    var += w[i] * (v[i] + d * d);
  }
  return {lse, mean, var};
}

struct LineFunctionals {
  ErrorEstimate entropy, fisher, fisher2;
};

ErrorEstimate entropy_1d(const MixtureModel& line, const QuadratureSpec& spec) {
  return integrate_against_density(
      line, [](const LocalLogDensity& l, double) { return -l.log_rho; }, spec);
}

ErrorEstimate fisher_1d(const MixtureModel& line, const QuadratureSpec& spec) {
  return integrate_against_density(
      line, [](const LocalLogDensity& l, double) { return l.score * l.score; }, spec);
}

ErrorEstimate fisher2_1d(const MixtureModel& line, const QuadratureSpec& spec) {
  return integrate_against_density(
      line, [](const LocalLogDensity& l, double) { return l.hessian * l.hessian; },
      spec);
}

ErrorEstimate scale(const ErrorEstimate& e, double factor) {
  return {factor * e.value, std::abs(factor) * e.abs_error};
}

}  // namespace

ErrorEstimate entropy(const MixtureModel& model, const QuadratureSpec& spec) {
  require_smooth(model, "entropy");
  const AxisProjection p = reduce_or_throw(model, "entropy");
  ErrorEstimate e = entropy_1d(p.line_model, spec);
  e.value += 0.5 * p.orth_dims *
             std::log(2.0 * std::numbers::pi * std::numbers::e * p.shared_variance);
  return e;
}

ErrorEstimate fisher(const MixtureModel& model, const QuadratureSpec& spec) {
  require_smooth(model, "fisher");
  const AxisProjection p = reduce_or_throw(model, "fisher");
  ErrorEstimate e = fisher_1d(p.line_model, spec);
  e.value += p.orth_dims / p.shared_variance;
  return e;
}

ErrorEstimate fisher2(const MixtureModel& model, const QuadratureSpec& spec) {
  require_smooth(model, "fisher2");
  const AxisProjection p = reduce_or_throw(model, "fisher2");
  ErrorEstimate e = fisher2_1d(p.line_model, spec);
  e.value += p.orth_dims / (p.shared_variance * p.shared_variance);
  return e;
}

ErrorEstimate mutual_info(const MixtureModel& initial, double t,
                          const QuadratureSpec& spec) {
  require_time(t, "mutual_info");
  require_floor(initial, t, "mutual_info");
  ErrorEstimate h = entropy(initial.evolved(t), spec);
  h.value -= 0.5 * initial.dim() *
             std::log(2.0 * std::numbers::pi * std::numbers::e * t);
  return h;
}

ErrorEstimate mutual_fisher(const MixtureModel& initial, double t,
                            const QuadratureSpec& spec) {
  require_time(t, "mutual_fisher");
  require_floor(initial, t, "mutual_fisher");
  const ErrorEstimate j = fisher(initial.evolved(t), spec);
  return {initial.dim() / t - j.value, j.abs_error};
}

ErrorEstimate mutual_fisher2(const MixtureModel& initial, double t,
                             const QuadratureSpec& spec) {
  require_time(t, "mutual_fisher2");
  require_floor(initial, t, "mutual_fisher2");
  const ErrorEstimate k = fisher2(initial.evolved(t), spec);
  return {initial.dim() / (t * t) - k.value, k.abs_error};
}

MutualTriple two_point_closed_form(double a_norm_sq, double t,
                                   const QuadratureSpec& spec) {
  if (!(a_norm_sq > 0.0)) throw InvalidArgument("two_point_closed_form: ||a||^2 must be > 0");
  require_time(t, "two_point_closed_form");
  const double u = a_norm_sq / t;
  const ErrorEstimate lc = expect_gaussian_1d(log_cosh, u, u, spec);
  const ErrorEstimate e2 = expect_gaussian_1d(sech2, u, u, spec);
  const ErrorEstimate e4 = expect_gaussian_1d(sech4, u, u, spec);

  MutualTriple out;
  out.info = {u - lc.value, lc.abs_error};
  out.fisher = scale(e2, u / t);
  const double c2 = 2.0 * u / (t * t);
  const double c4 = u * u / (t * t);
  out.fisher2 = {c2 * e2.value - c4 * e4.value, c2 * e2.abs_error + c4 * e4.abs_error};
  return out;
}

MutualTriple two_gaussian_closed_form(double a_norm_sq, double s, double t, int n,
                                      const QuadratureSpec& spec) {
  if (!(a_norm_sq >= 0.0)) throw InvalidArgument("two_gaussian_closed_form: ||a||^2 must be >= 0");
  if (!(s > 0.0)) throw InvalidArgument("two_gaussian_closed_form: s must be > 0");
  if (n < 1) throw InvalidArgument("two_gaussian_closed_form: n must be >= 1");
  require_time(t, "two_gaussian_closed_form");
  const double st = s + t;
  const double u = a_norm_sq / st;
  const ErrorEstimate lc = expect_gaussian_1d(log_cosh, u, u, spec);
  const ErrorEstimate e2 = expect_gaussian_1d(sech2, u, u, spec);
  const ErrorEstimate e4 = expect_gaussian_1d(sech4, u, u, spec);

  MutualTriple out;
  out.info = {0.5 * n * std::log1p(s / t) + u - lc.value, lc.abs_error};
  const double j_gauss = n * s / (t * st);
  out.fisher = {j_gauss + u / st * e2.value, u / st * e2.abs_error};
  const double k_gauss = n * s * (s + 2.0 * t) / (t * t * st * st);
  const double c2 = 2.0 * u / (st * st);
  const double c4 = u * u / (st * st);
  out.fisher2 = {k_gauss + c2 * e2.value - c4 * e4.value,
                 c2 * e2.abs_error + c4 * e4.abs_error};
  return out;
}

MutualTriple mutual_functionals_by_quadrature(const MixtureModel& initial, double t,
                                              const QuadratureSpec& spec) {
  require_time(t, "mutual_functionals");
  require_floor(initial, t, "mutual_functionals");
  const MixtureModel evolved = initial.evolved(t);
  const int n = initial.dim();
  MutualTriple out;
  out.info = entropy(evolved, spec);
  out.info.value -= 0.5 * n * std::log(2.0 * std::numbers::pi * std::numbers::e * t);
  const ErrorEstimate j = fisher(evolved, spec);
  out.fisher = {n / t - j.value, j.abs_error};
  const ErrorEstimate k = fisher2(evolved, spec);
  out.fisher2 = {n / (t * t) - k.value, k.abs_error};
  return out;
}

MutualTriple mutual_functionals(const MixtureModel& initial, double t,
                                const QuadratureSpec& spec) {
  if (auto a_sq = symmetric_pair_half_gap_sq(initial); a_sq && *a_sq > 0.0) {
    const double s = initial.variances().front();
    if (s == 0.0) return two_point_closed_form(*a_sq, t, spec);
    return two_gaussian_closed_form(*a_sq, s, t, initial.dim(), spec);
  }
  return mutual_functionals_by_quadrature(initial, t, spec);
}

ReverseFisher reverse_mutual_fisher(double t, const MixtureModel& initial,
                                    const QuadratureSpec& spec) {
  require_time(t, "reverse_mutual_fisher");
  const int n = initial.dim();
  ReverseFisher out{n / t, kInf};
  if (initial.is_smooth()) {
    out.k_rev = n / (t * t) + 2.0 * fisher(initial, spec).value / t;
  }
  return out;
}

namespace {

// E over (X_0, X_t) of the squared conditional score and squared
// conditional Hessian of x -> log rho_{0|t}(x | y).
ReverseFisherEstimate conditional_fisher_pair(const MixtureModel& initial, double t,
                                              const QuadratureSpec& spec) {
  if (initial.dim() != 1) {
    throw Unsupported("joint-law quadrature is implemented for n = 1");
  }
  require_smooth(initial, "conditional quadrature");
  require_time(t, "conditional quadrature");
  const HermiteRule& rule = cached_hermite_rule(spec.order);
  const double root_t = std::sqrt(t);

  auto inner_score = [&](const LocalLogDensity& l, double) {
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      // y = x + sqrt(t) z, so (y - x)/t = z / sqrt(t).
      const double g = l.score + rule.nodes[k] / root_t;
      sum += rule.weights[k] * g * g;
    }
    return sum;
  };
  auto inner_hessian = [&](const LocalLogDensity& l, double) {
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double h = l.hessian - 1.0 / t;
      sum += rule.weights[k] * h * h;
    }
    return sum;
  };
  return {integrate_against_density(initial, inner_score, spec),
          integrate_against_density(initial, inner_hessian, spec)};
}

}  // namespace

ReverseFisherEstimate reverse_mutual_fisher_by_quadrature(const MixtureModel& initial,
                                                          double t,
                                                          const QuadratureSpec& spec) {
  ReverseFisherEstimate cond = conditional_fisher_pair(initial, t, spec);
  const ErrorEstimate j0 = fisher_1d(initial, spec);
  const ErrorEstimate k0 = fisher2_1d(initial, spec);
  return {{cond.j_rev.value - j0.value, cond.j_rev.abs_error + j0.abs_error},
          {cond.k_rev.value - k0.value, cond.k_rev.abs_error + k0.abs_error}};
}

ErrorEstimate conditional_fisher_by_quadrature(const MixtureModel& initial, double t,
                                               const QuadratureSpec& spec) {
  if (!initial.is_smooth()) return {kInf, 0.0};
  return conditional_fisher_pair(initial, t, spec).j_rev;
}

double conditional_fisher(const MixtureModel& initial, double t,
                          const QuadratureSpec& spec) {
  require_time(t, "conditional_fisher");
  if (!initial.is_smooth()) return kInf;
  return fisher(initial, spec).value + initial.dim() / t;
}

BackwardInfo backward_info(const MixtureModel& initial, double t,
                           const QuadratureSpec& spec) {
  if (!initial.is_point_mass()) {
    throw Unsupported("backward_info requires a point-mass initial model");
  }
  require_time(t, "backward_info");
  require_floor(initial, t, "backward_info");
  const AxisProjection p = reduce_or_throw(initial, "backward_info");
  const MixtureModel& line = p.line_model;
  const MixtureModel evolved = line.evolved(t);

  BackwardInfo out;
  if (line.size() == 1) return out;

  const auto centers = line_centers(evolved);
  const auto scales = line_scales(evolved);
  auto var_integrand = [&](double y) {
    const LinePosterior post = line_posterior(line, evolved, t, y);
    return std::exp(post.log_rho) * post.variance;
  };
  auto hs_integrand = [&](double y) {
    const LinePosterior post = line_posterior(line, evolved, t, y);
    return std::exp(post.log_rho) * post.variance * post.variance;
  };
  const ErrorEstimate var = integrate_over_components(var_integrand, centers, scales, spec);
  const ErrorEstimate hs = integrate_over_components(hs_integrand, centers, scales, spec);
  out.var_cond = var.value;
  out.var_cond_err = var.abs_error;
  out.cov_hs_sq = hs.value;
  out.cov_hs_sq_err = hs.abs_error;
  out.phi = var.value / (t * t);
  out.psi = hs.value / (t * t * t * t);
  return out;
}

ErrorEstimate backward_cross_term(const MixtureModel& initial, double t,
                                  const QuadratureSpec& spec) {
  if (!initial.is_point_mass()) {
    throw Unsupported("backward_cross_term requires a point-mass initial model");
  }
  require_time(t, "backward_cross_term");
  require_floor(initial, t, "backward_cross_term");
  const AxisProjection p = reduce_or_throw(initial, "backward_cross_term");
  const MixtureModel& line = p.line_model;
  const MixtureModel evolved = line.evolved(t);
  if (line.size() == 1) return {0.0, 0.0};

  // Along the center axis Cov(X_0|X_t=y) = v(y) u u^T, so the inner product
  // reduces to the axis second derivative times v(y).
  const auto centers = line_centers(evolved);
  const auto scales = line_scales(evolved);
  auto integrand = [&](double y) {
    const LocalLogDensity l = local_log_density_1d(evolved, y);
    const LinePosterior post = line_posterior(line, evolved, t, y);
    return std::exp(l.log_rho) * (-l.hessian) * post.variance;
  };
  const ErrorEstimate e = integrate_over_components(integrand, centers, scales, spec);
  return scale(e, 2.0 / (t * t));
}

ErrorEstimate conditional_variance(const MixtureModel& initial, double t,
                                   const QuadratureSpec& spec) {
  require_time(t, "conditional_variance");
  require_floor(initial, t, "conditional_variance");
  const AxisProjection p = reduce_or_throw(initial, "conditional_variance");
  const MixtureModel& line = p.line_model;
  const MixtureModel evolved = line.evolved(t);
  const auto centers = line_centers(evolved);
  const auto scales = line_scales(evolved);
  auto integrand = [&](double y) {
    const LinePosterior post = line_posterior(line, evolved, t, y);
    return std::exp(post.log_rho) * post.variance;
  };
  ErrorEstimate e = integrate_over_components(integrand, centers, scales, spec);
  const double s = p.shared_variance;
  e.value += p.orth_dims * s * t / (s + t);
  return e;
}

InfoFunctionals info_functionals(const MixtureModel& initial, double t,
                                 const QuadratureSpec& spec) {
  require_time(t, "info_functionals");
  require_floor(initial, t, "info_functionals");
  const MixtureModel evolved = initial.evolved(t);
  const int n = initial.dim();
  InfoFunctionals out;
  out.t = t;
  out.entropy = entropy(evolved, spec);
  out.fisher = fisher(evolved, spec);
  out.fisher2 = fisher2(evolved, spec);
  out.info = {out.entropy.value -
                  0.5 * n * std::log(2.0 * std::numbers::pi * std::numbers::e * t),
              out.entropy.abs_error};
  out.mutual_fisher = {n / t - out.fisher.value, out.fisher.abs_error};
  out.mutual_fisher2 = {n / (t * t) - out.fisher2.value, out.fisher2.abs_error};
  return out;
}

}  // namespace heatflow
