#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace heatflow {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Weighted mixture sum_i p_i N(a_i, s_i I) in R^n; s_i = 0 is a point mass.
///
/// Immutable. Components with identical center and variance are merged at
/// construction (weights summed); merged_count() reports how many were
/// folded. The model remembers the heat-flow time applied to its base
/// variances, so evolving a freshly built model by t1 and then t2 yields
/// exactly the same fields as evolving it by t1 + t2.
class MixtureModel {
 public:
  static MixtureModel create(int dim, std::vector<double> weights,
                             std::vector<Point> centers,
                             std::vector<double> variances);

  /// 1-D convenience constructor.
  static MixtureModel create_1d(std::vector<double> weights,
                                const std::vector<double>& centers,
                                std::vector<double> variances);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Point>& centers() const { return centers_; }
  /// Component variances s_i + elapsed.
  const std::vector<double>& variances() const { return variances_; }
  const std::vector<double>& base_variances() const { return base_variances_; }
  double elapsed() const { return elapsed_; }
  int merged_count() const { return merged_; }

  bool is_point_mass() const;  // every s_i == 0
  bool is_smooth() const;      // every s_i > 0
  bool has_shared_variance() const;

  MixtureModel evolved(double t) const;

  /// log p_i - (n/2) log(2 pi s_i); requires is_smooth().
  const std::vector<double>& log_normalizers() const { return log_norm_; }

  friend bool operator==(const MixtureModel& a, const MixtureModel& b);

 private:
  MixtureModel() = default;
  void finalize();

  int dim_ = 1;
  std::vector<double> weights_;
  std::vector<Point> centers_;
  std::vector<double> base_variances_;
  std::vector<double> variances_;
  std::vector<double> log_norm_;
  double elapsed_ = 0.0;
  int merged_ = 0;
};

struct MixtureStats {
  Point mean;
  double variance = 0.0;       // E||X - mu||^2
  double fourth_moment = 0.0;  // E||X - mu||^4
  double diameter = 0.0;       // support diameter; +inf with any s_i > 0
  double center_diameter = 0.0;
  double min_separation = 0.0;  // +inf for k = 1
  double p_inf = 1.0;           // max_{i,j} p_i / p_j
  double discrete_entropy = 0.0;
};

MixtureModel heat_evolve(const MixtureModel& model, double t);

double log_density(const MixtureModel& model, const Point& y);
double density(const MixtureModel& model, const Point& y);
Point log_density_grad(const MixtureModel& model, const Point& y);
Matrix log_density_hessian(const MixtureModel& model, const Point& y);

/// Scalar log-density, score and second derivative of a 1-D model.
struct LocalLogDensity {
  double log_rho;
  double score;
  double hessian;
};

LocalLogDensity local_log_density_1d(const MixtureModel& model, double y);

struct Posterior {
  Eigen::VectorXd weights;
  /// True when the initial model has Gaussian components: the weights are
  /// then a posterior over components, not the law of X_0 given X_t.
  bool over_components = false;
};

/// Component posterior at y after evolving `initial` by t:
/// w_i(y) proportional to p_i N(y; a_i, (s_i + t) I).
Posterior posterior_weights(const MixtureModel& initial, double t, const Point& y);

/// Cov(X_0 | X_t = y) for a point-mass initial model.
Matrix conditional_cov(const MixtureModel& initial, double t, const Point& y);

MixtureStats stats(const MixtureModel& model);

/// Reduction of a mixture whose centers lie on one line and whose components
/// share a variance: along the line the law is the 1-D `line_model`, and the
/// orth_dims orthogonal coordinates are independent N(0, shared_variance).
/// A 1-D model reduces to itself with orth_dims = 0 and no variance
/// requirement.
struct AxisProjection {
  MixtureModel line_model;
  int orth_dims = 0;
  double shared_variance = 0.0;
  Point direction;
};

std::optional<AxisProjection> project_to_axis(const MixtureModel& model);

/// Equal weights, equal variances, two components: the family with closed
/// forms along the heat flow. Returns ||a||^2 with a the half-separation.
std::optional<double> symmetric_pair_half_gap_sq(const MixtureModel& model);

}  // namespace heatflow
