#include "heatflow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "heatflow/errors.hpp"

namespace heatflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kPanelOrder = 10;
constexpr int kLogPanelOrder = 20;
constexpr int kMaxLevels = 12;

void require_finite(double value, double node, const char* where) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << where << ": non-finite integrand " << value << " at node " << node;
    throw NumericFailure(os.str(), node);
  }
}

// Orthonormal probabilists' Hermite polynomials q_0..q_{m} at x, returning
// q_m, q_{m-1} and sum_{k<m} q_k^2.
struct HermiteEval {
  double q_m;
  double q_m1;
  double christoffel;
};

HermiteEval eval_hermite(int m, double x) {
  double q_prev = 0.0;
  double q = 1.0;
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    sum += q * q;
    const double next = (x * q - std::sqrt(static_cast<double>(k)) * q_prev) /
                        std::sqrt(static_cast<double>(k + 1));
    q_prev = q;
    q = next;
  }
  return {q, q_prev, sum};
}

const LegendreRule& panel_rule(int order) {
  static const LegendreRule rule10 = gauss_legendre_rule(kPanelOrder);
  static const LegendreRule rule20 = gauss_legendre_rule(kLogPanelOrder);
  return order == kLogPanelOrder ? rule20 : rule10;
}

struct Segment {
  double lo;
  double hi;
  long panels;
};

double composite_sum(const RealFn& f, const std::vector<Segment>& segments,
                     long multiplier, const char* where) {
  const LegendreRule& rule = panel_rule(kPanelOrder);
  double total = 0.0;
  for (const Segment& seg : segments) {
    const long panels = seg.panels * multiplier;
    const double width = (seg.hi - seg.lo) / static_cast<double>(panels);
    const double half = 0.5 * width;
    double seg_sum = 0.0;
    for (long p = 0; p < panels; ++p) {
      const double mid = seg.lo + (static_cast<double>(p) + 0.5) * width;
      double panel_sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = mid + half * rule.nodes[i];
        const double v = f(x);
        require_finite(v, x, where);
        panel_sum += rule.weights[i] * v;
      }
      seg_sum += half * panel_sum;
    }
    total += seg_sum;
  }
  return total;
}

ErrorEstimate refine_until_converged(const RealFn& f,
                                     const std::vector<Segment>& segments,
                                     const QuadratureSpec& spec,
                                     const char* where) {
  double prev = composite_sum(f, segments, 1, where);
  double last_err = kInf;
  int stalls = 0;
  for (int level = 1; level <= kMaxLevels; ++level) {
    const double cur = composite_sum(f, segments, 1L << level, where);
    const double err = std::abs(cur - prev);
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(cur))) {
      return {cur, err};
    }
    stalls = err >= last_err ? stalls + 1 : 0;
    if (stalls >= 3) {
      std::ostringstream os;
      os << where << ": error estimate " << err
         << " failed to shrink across 3 refinements";
      throw ConvergenceFailure(os.str());
    }
    last_err = err;
    prev = cur;
  }
  std::ostringstream os;
  os << where << ": no convergence after " << kMaxLevels
     << " refinements (last error " << last_err << ")";
  throw ConvergenceFailure(os.str());
}

// Running log-sum-exp accumulator.
struct LogAccumulator {
  double max = -kInf;
  double sum = 0.0;

  void add(double log_term) {
    if (log_term == -kInf) return;
    if (log_term <= max) {
      sum += std::exp(log_term - max);
    } else {
      sum = sum * std::exp(max - log_term) + 1.0;
      max = log_term;
    }
  }
  double value() const { return max == -kInf ? -kInf : max + std::log(sum); }
};

}  // namespace

void QuadratureSpec::validate() const {
  if (order < 2) throw InvalidArgument("quadrature order must be >= 2");
  if (!(truncation_radius >= 6.0)) {
    throw InvalidArgument("truncation_radius must be >= 6");
  }
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw InvalidArgument("quadrature tolerances must be positive");
  }
}

HermiteRule gauss_hermite_rule(int order) {
  if (order < 2) throw InvalidArgument("Gauss-Hermite order must be >= 2");
  const int m = order;

  // Golub-Welsch for the starting nodes, then Newton on q_m.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sub(m - 1);
  for (int k = 1; k < m; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  HermiteRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = solver.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      const HermiteEval e = eval_hermite(m, x);
      const double dx = e.q_m / (std::sqrt(static_cast<double>(m)) * e.q_m1);
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;
  }
  std::sort(rule.nodes.begin(), rule.nodes.end());
  for (int i = 0; i < m / 2; ++i) {
    const double sym = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -sym;
    rule.nodes[m - 1 - i] = sym;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;

  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    rule.weights[i] = 1.0 / eval_hermite(m, rule.nodes[i]).christoffel;
    total += rule.weights[i];
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

const HermiteRule& cached_hermite_rule(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const HermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, std::make_unique<const HermiteRule>(
                                  gauss_hermite_rule(order)))
             .first;
  }
  return *it->second;
}

LegendreRule gauss_legendre_rule(int order) {
  if (order < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
  LegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

ErrorEstimate expect_gaussian_1d(const RealFn& f, double mean, double variance,
                                 const QuadratureSpec& spec) {
  spec.validate();
  if (!(variance >= 0.0)) {
    throw InvalidArgument("expect_gaussian_1d: variance must be nonnegative");
  }
  if (variance < 1e-300) {
    const double v = f(mean);
    require_finite(v, mean, "expect_gaussian_1d");
    return {v, 0.0};
  }
  const double sigma = std::sqrt(variance);

  if (spec.method == QuadratureMethod::gauss_hermite) {
    auto evaluate = [&](int order) {
      const HermiteRule& rule = cached_hermite_rule(order);
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = mean + sigma * rule.nodes[i];
        const double v = f(x);
        require_finite(v, x, "expect_gaussian_1d");
        sum += rule.weights[i] * v;
      }
      return sum;
    };
    const double fine = evaluate(spec.order);
    const double coarse = evaluate(std::max(2, spec.order / 2));
    return {fine, std::abs(fine - coarse)};
  }

  const double r = spec.truncation_radius;
  auto integrand = [&](double z) {
    return f(mean + sigma * z) * std::exp(log_normal_pdf(z));
  };
  // 32 base panels keep the node spacing below 0.1 sigma at the first level.
  const std::vector<Segment> segments{{-r, r, 32}};
  return refine_until_converged(integrand, segments, spec, "expect_gaussian_1d");
}

ErrorEstimate integrate_over_components(const RealFn& integrand,
                                        std::span<const double> centers,
                                        std::span<const double> scales,
                                        const QuadratureSpec& spec) {
  spec.validate();
  if (centers.size() != scales.size() || centers.empty()) {
    throw InvalidArgument("centers and scales must be non-empty and aligned");
  }
  struct Interval {
    double lo, hi, min_scale;
  };
  std::vector<Interval> intervals;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!(scales[i] > 0.0)) throw InvalidArgument("component scales must be > 0");
    const double half = spec.truncation_radius * scales[i];
    intervals.push_back({centers[i] - half, centers[i] + half, scales[i]});
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& iv : intervals) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
      merged.back().min_scale = std::min(merged.back().min_scale, iv.min_scale);
    } else {
      merged.push_back(iv);
    }
  }
  std::vector<Segment> segments;
  for (const Interval& iv : merged) {
    const double ratio = (iv.hi - iv.lo) / iv.min_scale;
    const long panels = std::clamp(static_cast<long>(std::ceil(ratio)), 8L, 1L << 14);
    segments.push_back({iv.lo, iv.hi, panels});
  }
  return refine_until_converged(integrand, segments, spec,
                                "integrate_over_components");
}

ErrorEstimate integrate_density_functional(const RealFn& g,
                                           const RealFn& weight_density,
                                           std::span<const double> centers,
                                           std::span<const double> scales,
                                           const QuadratureSpec& spec) {
  auto integrand = [&](double x) {
    const double w = weight_density(x);
    if (w < 0.0) {
      throw InvalidArgument("weight_density must be nonnegative");
    }
    return w == 0.0 ? 0.0 : w * g(x);
  };
  return integrate_over_components(integrand, centers, scales, spec);
}

double finite_difference(const RealFn& curve, double t, int order, double step) {
  if (!(step > 0.0)) throw InvalidArgument("finite_difference: step must be > 0");
  if (!(t - 2.0 * step > 0.0)) {
    throw InvalidArgument("finite_difference: t - 2*step must be > 0");
  }
  if (order == 1) {
    return (curve(t + step) - curve(t - step)) / (2.0 * step);
  }
  if (order == 2) {
    return (curve(t + step) - 2.0 * curve(t) + curve(t - step)) / (step * step);
  }
  throw InvalidArgument("finite_difference: order must be 1 or 2");
}

double default_fd_step(double t, int order) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(t, 1.0);
  if (order == 1) return scale * std::cbrt(eps);
  if (order == 2) return scale * std::pow(eps, 0.25);
  throw InvalidArgument("default_fd_step: order must be 1 or 2");
}

LogIntegral log_integrate(const RealFn& log_f, std::span<const LogWindow> windows,
                          double rel_tol, double half_width, int min_nodes) {
  if (windows.empty()) throw InvalidArgument("log_integrate: no windows");
  if (!(rel_tol > 0.0)) throw InvalidArgument("log_integrate: rel_tol must be > 0");

  std::vector<double> cuts;
  for (const LogWindow& w : windows) {
    if (!(w.scale > 0.0) || !std::isfinite(w.center)) {
      throw InvalidArgument("log_integrate: bad window");
    }
    cuts.push_back(w.center - half_width * w.scale);
    cuts.push_back(w.center + half_width * w.scale);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Segment> segments;
  long total_panels = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double mid = 0.5 * (lo + hi);
    double width = kInf;
    for (const LogWindow& w : windows) {
      if (std::abs(mid - w.center) <= half_width * w.scale) {
        width = std::min(width, w.scale);
      }
    }
    if (width == kInf || !(hi > lo)) continue;
    const long panels = std::clamp(static_cast<long>(std::ceil((hi - lo) / width)),
                                   1L, 1L << 16);
    segments.push_back({lo, hi, panels});
    total_panels += panels;
  }
  const long min_panels = (min_nodes + kLogPanelOrder - 1) / kLogPanelOrder;
  if (total_panels < min_panels) {
    const long factor = (min_panels + total_panels - 1) / total_panels;
    for (Segment& s : segments) s.panels *= factor;
    total_panels *= factor;
  }

  const LegendreRule& rule = panel_rule(kLogPanelOrder);
  std::vector<double> log_weights(rule.weights.size());
  for (std::size_t i = 0; i < rule.weights.size(); ++i) {
    log_weights[i] = std::log(rule.weights[i]);
  }
  auto evaluate = [&](long multiplier) {
    LogAccumulator acc;
    for (const Segment& seg : segments) {
      const long panels = seg.panels * multiplier;
      const double width = (seg.hi - seg.lo) / static_cast<double>(panels);
      const double log_half = std::log(0.5 * width);
      for (long p = 0; p < panels; ++p) {
        const double mid = seg.lo + (static_cast<double>(p) + 0.5) * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          const double x = mid + 0.5 * width * rule.nodes[i];
          const double lf = log_f(x);
          if (std::isnan(lf) || lf == kInf) {
            std::ostringstream os;
            os << "log_integrate: invalid log-integrand " << lf << " at node " << x;
            throw NumericFailure(os.str(), x);
          }
          acc.add(lf + log_weights[i] + log_half);
        }
      }
    }
    return acc.value();
  };

  double prev = evaluate(1);
  for (int level = 1; level <= kMaxLevels; ++level) {
    const long mult = 1L << level;
    const double cur = evaluate(mult);
    double rel = 0.0;
    if (cur == -kInf && prev == -kInf) {
      rel = 0.0;
    } else {
      rel = std::abs(std::expm1(cur - prev));
    }
    if (rel <= rel_tol) {
      return {cur, rel, static_cast<int>(total_panels * mult * kLogPanelOrder)};
    }
    prev = cur;
  }
  throw ConvergenceFailure("log_integrate: no convergence");
}

double log_sum_exp(std::span<const double> values) {
  LogAccumulator acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double sech2(double x) {
  const double e = std::exp(-2.0 * std::abs(x));
  const double d = 1.0 + e;
  return 4.0 * e / (d * d);
}

double sech4(double x) {
  const double s = sech2(x);
  return s * s;
}

double log_normal_pdf(double z) {
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_softplus(double x) {
  if (x < -36.0) return x;
  if (x > 36.0) return std::log(x + std::log1p(std::exp(-x)));
  return std::log(std::log1p(std::exp(x)));
}

}  // namespace heatflow
