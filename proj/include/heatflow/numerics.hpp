#pragma once

#include <functional>
#include <span>
#include <vector>

namespace heatflow {

using RealFn = std::function<double(double)>;

enum class QuadratureMethod { gauss_hermite, adaptive_interval };

// Controls every expectation and integral in the library.
//
// gauss_hermite integrates against the Gaussian weight with `order` nodes;
// adaptive_interval runs composite Gauss-Legendre panels over
// [mean - R*sigma, mean + R*sigma] (R = truncation_radius), doubling the
// panel count until successive levels agree within the tolerances.
struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::adaptive_interval;
  int order = 80;
  double truncation_radius = 12.0;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;

  /// Throws InvalidArgument unless order >= 2, R >= 6 and both tolerances
  /// are positive.
  void validate() const;
};

struct ErrorEstimate {
  double value = 0.0;
  double abs_error = 0.0;  // |fine - coarse| between the last two levels
};

/// Probabilists' Gauss-Hermite rule: for Z ~ N(0,1),
/// sum_i w_i f(x_i) is exact for polynomials of degree <= 2*order - 1.
/// Nodes are ascending and weights sum to one.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

HermiteRule gauss_hermite_rule(int order);

/// Shared, immutable copy of gauss_hermite_rule(order); safe to call from
/// concurrent workers.
const HermiteRule& cached_hermite_rule(int order);

/// Gauss-Legendre rule on [-1, 1].
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

LegendreRule gauss_legendre_rule(int order);

/// E[f(mean + sqrt(variance) Z)] for Z ~ N(0,1). Variance below 1e-300 is
/// treated as a point mass and returns f(mean) exactly.
ErrorEstimate expect_gaussian_1d(const RealFn& f, double mean, double variance,
                                 const QuadratureSpec& spec);

/// Integral of `integrand` over the union of [c_i - R s_i, c_i + R s_i].
/// Overlapping intervals are merged; the panel width inside each merged
/// interval starts at the smallest scale it contains.
ErrorEstimate integrate_over_components(const RealFn& integrand,
                                        std::span<const double> centers,
                                        std::span<const double> scales,
                                        const QuadratureSpec& spec);

/// Integral of weight_density(x) * g(x) over the merged component intervals.
ErrorEstimate integrate_density_functional(const RealFn& g,
                                           const RealFn& weight_density,
                                           std::span<const double> centers,
                                           std::span<const double> scales,
                                           const QuadratureSpec& spec);

/// Central difference of order 1 or 2. Requires t - 2*step > 0.
double finite_difference(const RealFn& curve, double t, int order, double step);

/// max(t,1)*eps^(1/3) for order 1, max(t,1)*eps^(1/4) for order 2.
double default_fd_step(double t, int order);

// ---------------------------------------------------------------------------
// Log-space integration, for integrands whose value underflows doubles.

/// Region where the integrand carries mass: [center - H*scale, center + H*scale].
struct LogWindow {
  double center;
  double scale;
};

struct LogIntegral {
  double log_value;
  double rel_error;  // |exp(log_fine - log_coarse) - 1|
  int nodes;         // node count of the accepted level
};

/// log of the integral of exp(log_f) over the union of the windows.
/// Panels inside a window are at most one window scale wide; the coarsest
/// level has at least `min_nodes` nodes.
LogIntegral log_integrate(const RealFn& log_f, std::span<const LogWindow> windows,
                          double rel_tol, double half_width = 80.0,
                          int min_nodes = 200);

// ---------------------------------------------------------------------------
// Stable scalar helpers.

double log_sum_exp(std::span<const double> values);
double log_cosh(double x);
double sech2(double x);
double sech4(double x);
double log_normal_pdf(double z);
/// log(log(1 + exp(x)))
double log_softplus(double x);

}  // namespace heatflow
