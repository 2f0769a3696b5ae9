#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's quadrature: integrals are plain trapezoid sums or Monte Carlo.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "heatflow/mixtures.hpp"

namespace oracle {

inline double trapezoid(const std::function<double(double)>& f, double lo, double hi, long n) {
  const double h = (hi - lo) / static_cast<double>(n);
  double sum = 0.5 * (f(lo) + f(hi));
  for (long i = 1; i < n; ++i) sum += f(lo + h * static_cast<double>(i));
  return sum * h;
}

// Density of a 1-D Gaussian mixture, evaluated term by term.
inline double mixture_pdf(const std::vector<double>& w, const std::vector<double>& a,
                          const std::vector<double>& s, double x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = x - a[i];
    sum += w[i] * std::exp(-d * d / (2.0 * s[i])) / std::sqrt(2.0 * std::numbers::pi * s[i]);
  }
  return sum;
}

// First and second derivative of the mixture density, term by term.
inline double mixture_pdf_d1(const std::vector<double>& w, const std::vector<double>& a,
                             const std::vector<double>& s, double x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = x - a[i];
    sum += -w[i] * d / s[i] * std::exp(-d * d / (2.0 * s[i])) / std::sqrt(2.0 * std::numbers::pi * s[i]);
  }
  return sum;
}

inline double mixture_pdf_d2(const std::vector<double>& w, const std::vector<double>& a,
                             const std::vector<double>& s, double x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = x - a[i];
    sum += w[i] * (d * d / (s[i] * s[i]) - 1.0 / s[i]) * std::exp(-d * d / (2.0 * s[i])) /
           std::sqrt(2.0 * std::numbers::pi * s[i]);
  }
  return sum;
}

inline double trapezoid_entropy(const std::vector<double>& w, const std::vector<double>& a,
                                const std::vector<double>& s, double lo, double hi, long n) {
  return trapezoid(
      [&](double x) {
        const double p = mixture_pdf(w, a, s, x);
        return p > 0.0 ? -p * std::log(p) : 0.0;
      },
      lo, hi, n);
}

inline double trapezoid_fisher(const std::vector<double>& w, const std::vector<double>& a,
                               const std::vector<double>& s, double lo, double hi, long n) {
  return trapezoid(
      [&](double x) {
        const double p = mixture_pdf(w, a, s, x);
        if (p < 1e-300) return 0.0;
        const double g = mixture_pdf_d1(w, a, s, x);
        return g * g / p;
      },
      lo, hi, n);
}

inline double trapezoid_fisher2(const std::vector<double>& w, const std::vector<double>& a,
                                const std::vector<double>& s, double lo, double hi, long n) {
  return trapezoid(
      [&](double x) {
        const double p = mixture_pdf(w, a, s, x);
        if (p < 1e-300) return 0.0;
        const double g = mixture_pdf_d1(w, a, s, x) / p;
        const double h = mixture_pdf_d2(w, a, s, x) / p - g * g;
        return p * h * h;
      },
      lo, hi, n);
}

// Mean and standard error of f(Z) over `samples` standard normal draws.
struct McResult {
  double mean;
  double std_error;
};

inline McResult monte_carlo_normal(const std::function<double(double)>& f, long samples,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double v = f(normal(rng));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sum_sq / static_cast<double>(samples) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

// Hand-rolled generator of small 1-D mixtures for property tests.
struct ModelGenerator {
  std::mt19937_64 rng;
  explicit ModelGenerator(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  // k in [1, max_k], centers in [-2, 2], weights bounded away from zero.
  heatflow::MixtureModel model(bool point_mass, int max_k = 4) {
    const int k = integer(1, max_k);
    std::vector<double> w(static_cast<std::size_t>(k));
    std::vector<double> a(static_cast<std::size_t>(k));
    std::vector<double> s(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      w[static_cast<std::size_t>(i)] = uniform(0.2, 1.0);
      total += w[static_cast<std::size_t>(i)];
      a[static_cast<std::size_t>(i)] = uniform(-2.0, 2.0);
      s[static_cast<std::size_t>(i)] = point_mass ? 0.0 : std::exp(uniform(std::log(0.05), std::log(2.0)));
    }
    for (double& x : w) x /= total;
    // Renormalise the last weight so the sum is 1 to rounding.
    double rest = 0.0;
    for (int i = 0; i + 1 < k; ++i) rest += w[static_cast<std::size_t>(i)];
    w.back() = 1.0 - rest;
    return heatflow::MixtureModel::create_1d(w, a, s);
  }
};

}  // namespace oracle
