#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "heatflow/errors.hpp"
#include "heatflow/numerics.hpp"
#include "oracles.hpp"

using namespace heatflow;

namespace {

// E[Z^p] for Z ~ N(0,1): (p-1)!! for even p, 0 for odd p.
double normal_moment(int p) {
  if (p % 2) return 0.0;
  double m = 1.0;
  for (int k = p - 1; k > 0; k -= 2) m *= k;
  return m;
}

}  // namespace

TEST_CASE("Gauss-Hermite rule integrates Gaussian moments exactly") {
  for (int order : {2, 5, 10, 20, 40}) {
    const HermiteRule rule = gauss_hermite_rule(order);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < rule.nodes.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    for (int p = 0; p <= std::min(2 * order - 1, 30); ++p) {
      double sum = 0.0;
      double magnitude = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double term = rule.weights[i] * std::pow(rule.nodes[i], p);
        sum += term;
        magnitude += std::abs(term);
      }
      // Odd moments cancel between mirrored nodes; rounding scales with the absolute sum.
      const double ref = normal_moment(p);
      CHECK(std::abs(sum - ref) <= 1e-13 * std::max(1.0, magnitude));
    }
  }
}

TEST_CASE("Gauss-Hermite nodes are symmetric") {
  const HermiteRule rule = gauss_hermite_rule(81);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[rule.nodes.size() - 1 - i]).epsilon(1e-12));
  }
  CHECK(std::abs(rule.nodes[40]) < 1e-12);
}

TEST_CASE("cached rule equals a fresh rule") {
  const HermiteRule& cached = cached_hermite_rule(30);
  const HermiteRule fresh = gauss_hermite_rule(30);
  CHECK(cached.nodes == fresh.nodes);
  CHECK(cached.weights == fresh.weights);
  CHECK(&cached_hermite_rule(30) == &cached);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials on [-1,1]") {
  for (int order : {3, 10, 20}) {
    const LegendreRule rule = gauss_legendre_rule(order);
    for (int p = 0; p < 2 * order; ++p) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], p);
      const double ref = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(sum == doctest::Approx(ref).epsilon(1e-13));
    }
  }
}

TEST_CASE("expect_gaussian_1d matches closed-form expectations") {
  for (QuadratureMethod method : {QuadratureMethod::gauss_hermite, QuadratureMethod::adaptive_interval}) {
    QuadratureSpec spec;
    spec.method = method;
    for (double mean : {-1.0, 0.0, 2.5}) {
      for (double var : {0.01, 1.0, 9.0}) {
        // E[cos(X)] = cos(mean) exp(-var/2)
        const ErrorEstimate e = expect_gaussian_1d([](double x) { return std::cos(x); }, mean, var, spec);
        CHECK(e.value == doctest::Approx(std::cos(mean) * std::exp(-var / 2)).epsilon(1e-10));
        // E[exp(X)] = exp(mean + var/2)
        const ErrorEstimate g = expect_gaussian_1d([](double x) { return std::exp(x); }, mean, var, spec);
        CHECK(g.value == doctest::Approx(std::exp(mean + var / 2)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("expect_gaussian_1d treats a vanishing variance as a point mass") {
  const QuadratureSpec spec;
  const ErrorEstimate e = expect_gaussian_1d([](double x) { return x * x; }, 3.0, 0.0, spec);
  CHECK(e.value == 9.0);
  CHECK(e.abs_error == 0.0);
}

TEST_CASE("adaptive quadrature resolves a sharp sech feature") {
  // E[sech^2(V)] for V ~ N(u, u) at u = 50; oracle: fine trapezoid.
  const double u = 50.0;
  const QuadratureSpec spec;
  const ErrorEstimate e = expect_gaussian_1d([](double v) { return sech2(v); }, u, u, spec);
  const double ref = oracle::trapezoid(
      [&](double v) {
        return sech2(v) * std::exp(-(v - u) * (v - u) / (2 * u)) / std::sqrt(2 * std::numbers::pi * u);
      },
      -60.0, 60.0, 2000000);
  CHECK(e.value == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("integrate_over_components covers separated bumps") {
  const std::vector<double> centers{-50.0, 0.0, 70.0};
  const std::vector<double> scales{0.01, 1.0, 3.0};
  auto f = [&](double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double z = (x - centers[i]) / scales[i];
      s += std::exp(-0.5 * z * z) / (scales[i] * std::sqrt(2 * std::numbers::pi));
    }
    return s;
  };
  const ErrorEstimate e = integrate_over_components(f, centers, scales, QuadratureSpec{});
  CHECK(e.value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("QuadratureSpec validation") {
  QuadratureSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.order = 1;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = {};
  spec.truncation_radius = 3.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = {};
  spec.rel_tol = 0.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("non-finite integrand raises NumericFailure with the node") {
  const QuadratureSpec spec;
  try {
    integrate_over_components([](double x) { return x > 0.5 ? std::nan("") : 1.0; },
                              std::vector<double>{0.0}, std::vector<double>{1.0}, spec);
    FAIL("expected NumericFailure");
  } catch (const NumericFailure& e) {
    CHECK(e.node() > 0.5);
  }
}

TEST_CASE("finite differences of smooth curves") {
  auto f = [](double t) { return std::sin(t) + t * t * t; };
  for (double t : {0.3, 1.0, 7.0}) {
    CHECK(finite_difference(f, t, 1, default_fd_step(t, 1)) ==
          doctest::Approx(std::cos(t) + 3 * t * t).epsilon(1e-8));
    CHECK(finite_difference(f, t, 2, default_fd_step(t, 2)) ==
          doctest::Approx(-std::sin(t) + 6 * t).epsilon(1e-6));
  }
  CHECK_THROWS_AS(finite_difference(f, 0.1, 1, 0.06), InvalidArgument);
  CHECK_THROWS_AS(finite_difference(f, 1.0, 3, 0.01), InvalidArgument);
}

TEST_CASE("log_integrate recovers Gaussian normalisers far below double range") {
  // Integral of exp(-x^2/(2 s^2) + shift) = shift + log(s sqrt(2 pi)).
  for (double s : {1e-3, 1.0, 30.0}) {
    for (double shift : {0.0, -2000.0}) {
      const LogWindow w[] = {{5.0, s}};
      const LogIntegral r = log_integrate(
          [&](double x) { return -(x - 5.0) * (x - 5.0) / (2 * s * s) + shift; }, w, 1e-13);
      CHECK(r.log_value == doctest::Approx(shift + std::log(s * std::sqrt(2 * std::numbers::pi))).epsilon(1e-12));
      CHECK(r.nodes >= 200);
    }
  }
}

TEST_CASE("stable scalar helpers agree with naive formulas where those are safe") {
  for (double x : {-30.0, -3.0, -0.2, 0.0, 0.7, 5.0, 30.0}) {
    CHECK(log_cosh(x) == doctest::Approx(std::log(std::cosh(x))).epsilon(1e-14));
    CHECK(sech2(x) == doctest::Approx(1.0 / (std::cosh(x) * std::cosh(x))).epsilon(1e-13));
    CHECK(sech4(x) == doctest::Approx(std::pow(std::cosh(x), -4)).epsilon(1e-13));
    CHECK(log_softplus(x) == doctest::Approx(std::log(std::log1p(std::exp(x)))).epsilon(1e-13));
  }
  CHECK(std::isfinite(log_cosh(1e4)));
  CHECK(log_cosh(1e4) == doctest::Approx(1e4 - std::log(2.0)));
  CHECK(sech2(800.0) == 0.0);
  CHECK(log_softplus(-800.0) == -800.0);
  CHECK(log_softplus(800.0) == doctest::Approx(std::log(800.0)));
}

TEST_CASE("log_sum_exp property: shift invariance and bounds") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(1 + trial % 7));
    for (double& x : v) x = u(rng);
    const double l = log_sum_exp(v);
    const double mx = *std::max_element(v.begin(), v.end());
    CHECK(l >= mx);
    CHECK(l <= mx + std::log(static_cast<double>(v.size())) + 1e-12);
    std::vector<double> shifted = v;
    for (double& x : shifted) x += 1000.0;
    CHECK(log_sum_exp(shifted) == doctest::Approx(l + 1000.0).epsilon(1e-14));
  }
}
