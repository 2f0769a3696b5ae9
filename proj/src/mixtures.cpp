#include "heatflow/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "heatflow/errors.hpp"
#include "heatflow/numerics.hpp"

namespace heatflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_smooth(const MixtureModel& model) {
  if (!model.is_smooth()) {
    throw SingularDensity("density requires every component variance > 0");
  }
}

// Normalized weights proportional to exp(logits).
Eigen::VectorXd softmax(const std::vector<double>& logits) {
  const double lse = log_sum_exp(logits);
  Eigen::VectorXd w(static_cast<Eigen::Index>(logits.size()));
  for (std::size_t i = 0; i < logits.size(); ++i) {
    w(static_cast<Eigen::Index>(i)) = std::exp(logits[i] - lse);
  }
  return w / w.sum();
}

std::vector<double> component_logits(const MixtureModel& model, const Point& y) {
  std::vector<double> logits(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    logits[i] = model.log_normalizers()[i] -
                (y - model.centers()[i]).squaredNorm() / (2.0 * model.variances()[i]);
  }
  return logits;
}

}  // namespace

MixtureModel MixtureModel::create(int dim, std::vector<double> weights,
                                  std::vector<Point> centers,
                                  std::vector<double> variances) {
  if (dim < 1) throw InvalidArgument("mixture dimension must be >= 1");
  if (weights.empty()) throw InvalidArgument("mixture needs at least one component");
  if (centers.size() != weights.size() || variances.size() != weights.size()) {
    throw InvalidArgument("weights, centers and variances must have equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw InvalidArgument("mixture weights must be strictly positive");
    }
    if (!(variances[i] >= 0.0) || !std::isfinite(variances[i])) {
      throw InvalidArgument("component variances must be finite and >= 0");
    }
    if (centers[i].size() != dim || !centers[i].allFinite()) {
      throw InvalidArgument("center dimension mismatch or non-finite center");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("mixture weights must sum to 1 within 1e-12");
  }

  MixtureModel model;
  model.dim_ = dim;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    bool merged = false;
    for (std::size_t j = 0; j < model.weights_.size(); ++j) {
      if (model.base_variances_[j] == variances[i] && model.centers_[j] == centers[i]) {
        model.weights_[j] += weights[i];
        ++model.merged_;
        merged = true;
        break;
      }
    }
    if (!merged) {
      model.weights_.push_back(weights[i]);
      model.centers_.push_back(std::move(centers[i]));
      model.base_variances_.push_back(variances[i]);
    }
  }
  model.finalize();
  return model;
}

MixtureModel MixtureModel::create_1d(std::vector<double> weights,
                                     const std::vector<double>& centers,
                                     std::vector<double> variances) {
  std::vector<Point> pts;
  pts.reserve(centers.size());
  for (double c : centers) pts.push_back(Point::Constant(1, c));
  return create(1, std::move(weights), std::move(pts), std::move(variances));
}

void MixtureModel::finalize() {
  variances_.resize(base_variances_.size());
  log_norm_.assign(base_variances_.size(), -kInf);
  for (std::size_t i = 0; i < base_variances_.size(); ++i) {
    variances_[i] = base_variances_[i] + elapsed_;
    if (variances_[i] > 0.0) {
      log_norm_[i] = std::log(weights_[i]) -
                     0.5 * dim_ * std::log(2.0 * std::numbers::pi * variances_[i]);
    }
  }
}

bool MixtureModel::is_point_mass() const {
  return std::all_of(variances_.begin(), variances_.end(),
                     [](double s) { return s == 0.0; });
}

bool MixtureModel::is_smooth() const {
  return std::all_of(variances_.begin(), variances_.end(),
                     [](double s) { return s > 0.0; });
}

bool MixtureModel::has_shared_variance() const {
  return std::all_of(variances_.begin(), variances_.end(),
                     [&](double s) { return s == variances_.front(); });
}

MixtureModel MixtureModel::evolved(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidArgument("heat_evolve: t must be finite and >= 0");
  }
  MixtureModel out = *this;
  out.elapsed_ = elapsed_ + t;
  out.finalize();
  return out;
}

bool operator==(const MixtureModel& a, const MixtureModel& b) {
  return a.dim_ == b.dim_ && a.weights_ == b.weights_ && a.centers_ == b.centers_ &&
         a.base_variances_ == b.base_variances_ && a.variances_ == b.variances_ &&
         a.elapsed_ == b.elapsed_;
}

MixtureModel heat_evolve(const MixtureModel& model, double t) {
  return model.evolved(t);
}

double log_density(const MixtureModel& model, const Point& y) {
  require_smooth(model);
  return log_sum_exp(component_logits(model, y));
}

double density(const MixtureModel& model, const Point& y) {
  return std::exp(log_density(model, y));
}

Point log_density_grad(const MixtureModel& model, const Point& y) {
  require_smooth(model);
  const Eigen::VectorXd w = softmax(component_logits(model, y));
  Point grad = Point::Zero(model.dim());
  for (std::size_t i = 0; i < model.size(); ++i) {
    grad += w(static_cast<Eigen::Index>(i)) * (model.centers()[i] - y) /
            model.variances()[i];
  }
  return grad;
}

Matrix log_density_hessian(const MixtureModel& model, const Point& y) {
  require_smooth(model);
  const int n = model.dim();
  const Eigen::VectorXd w = softmax(component_logits(model, y));
  Point mean_score = Point::Zero(n);
  double precision = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double wi = w(static_cast<Eigen::Index>(i));
    mean_score += wi * (model.centers()[i] - y) / model.variances()[i];
    precision += wi / model.variances()[i];
  }
  Matrix cov = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Point d = (model.centers()[i] - y) / model.variances()[i] - mean_score;
    cov += w(static_cast<Eigen::Index>(i)) * d * d.transpose();
  }
  return cov - precision * Matrix::Identity(n, n);
}

LocalLogDensity local_log_density_1d(const MixtureModel& model, double y) {
  require_smooth(model);
  const std::size_t k = model.size();
  double max_logit = -kInf;
  double logits[16];
  std::vector<double> heap;
  double* lg = logits;
  if (k > 16) {
    heap.resize(k);
    lg = heap.data();
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double d = y - model.centers()[i](0);
    lg[i] = model.log_normalizers()[i] - d * d / (2.0 * model.variances()[i]);
    max_logit = std::max(max_logit, lg[i]);
  }
  double sum = 0.0;
  double s1 = 0.0;
  double prec = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = std::exp(lg[i] - max_logit);
    const double g = (model.centers()[i](0) - y) / model.variances()[i];
    sum += e;
    s1 += e * g;
    prec += e / model.variances()[i];
  }
  const double score = s1 / sum;
  // Posterior variance of the component scores, accumulated in centered form.
  double var = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = std::exp(lg[i] - max_logit);
    const double g = (model.centers()[i](0) - y) / model.variances()[i] - score;
    var += e * g * g;
  }
  return {max_logit + std::log(sum), score, var / sum - prec / sum};
}

Posterior posterior_weights(const MixtureModel& initial, double t, const Point& y) {
  if (!(t > 0.0)) throw InvalidArgument("posterior_weights: t must be > 0");
  const MixtureModel evolved = initial.evolved(t);
  Posterior out;
  out.weights = softmax(component_logits(evolved, y));
  out.over_components = !initial.is_point_mass();
  return out;
}

Matrix conditional_cov(const MixtureModel& initial, double t, const Point& y) {
  if (!initial.is_point_mass()) {
    throw Unsupported("conditional_cov requires a point-mass initial model");
  }
  const Eigen::VectorXd w = posterior_weights(initial, t, y).weights;
  const int n = initial.dim();
  Point mean = Point::Zero(n);
  for (std::size_t i = 0; i < initial.size(); ++i) {
    mean += w(static_cast<Eigen::Index>(i)) * initial.centers()[i];
  }
  Matrix cov = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const Point d = initial.centers()[i] - mean;
    cov += w(static_cast<Eigen::Index>(i)) * d * d.transpose();
  }
  return 0.5 * (cov + cov.transpose());
}

MixtureStats stats(const MixtureModel& model) {
  const int n = model.dim();
  const std::size_t k = model.size();
  MixtureStats s;
  s.mean = Point::Zero(n);
  for (std::size_t i = 0; i < k; ++i) s.mean += model.weights()[i] * model.centers()[i];

  double var = 0.0;
  double m4 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double b2 = (model.centers()[i] - s.mean).squaredNorm();
    const double si = model.variances()[i];
    const double p = model.weights()[i];
    var += p * (b2 + n * si);
    m4 += p * (b2 * b2 + (4.0 + 2.0 * n) * si * b2 + n * (n + 2.0) * si * si);
  }
  s.variance = var;
  s.fourth_moment = m4;

  double diam = 0.0;
  double min_sep = kInf;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = (model.centers()[i] - model.centers()[j]).norm();
      diam = std::max(diam, d);
      min_sep = std::min(min_sep, d);
    }
  }
  s.center_diameter = diam;
  s.diameter = model.is_point_mass() ? diam : kInf;
  s.min_separation = min_sep;

  const auto [pmin, pmax] = std::minmax_element(model.weights().begin(),
                                                model.weights().end());
  s.p_inf = *pmax / *pmin;
  double h = 0.0;
  for (double p : model.weights()) h -= p * std::log(p);
  s.discrete_entropy = h;
  return s;
}

std::optional<AxisProjection> project_to_axis(const MixtureModel& model) {
  if (model.dim() == 1) {
    return AxisProjection{model, 0, model.variances().front(), Point::Ones(1)};
  }
  if (!model.has_shared_variance()) return std::nullopt;

  const int n = model.dim();
  const Point& origin = model.centers().front();
  std::size_t far = 0;
  double far_dist = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double d = (model.centers()[i] - origin).norm();
    if (d > far_dist) {
      far_dist = d;
      far = i;
    }
  }
  Point u = Point::Zero(n);
  u(0) = 1.0;
  if (far_dist > 0.0) u = (model.centers()[far] - origin) / far_dist;

  std::vector<double> coords(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Point& a = model.centers()[i];
    coords[i] = a.dot(u);
    const Point off_axis = (a - origin) - (a - origin).dot(u) * u;
    if (off_axis.norm() > 1e-12 * (1.0 + far_dist)) return std::nullopt;
  }
  const double s = model.variances().front();
  MixtureModel line = MixtureModel::create_1d(model.weights(), coords,
                                              std::vector<double>(model.size(), s));
  return AxisProjection{std::move(line), n - 1, s, u};
}

std::optional<double> symmetric_pair_half_gap_sq(const MixtureModel& model) {
  if (model.size() != 2) return std::nullopt;
  if (model.weights()[0] != model.weights()[1]) return std::nullopt;
  if (model.variances()[0] != model.variances()[1]) return std::nullopt;
  return 0.25 * (model.centers()[0] - model.centers()[1]).squaredNorm();
}

}  // namespace heatflow
