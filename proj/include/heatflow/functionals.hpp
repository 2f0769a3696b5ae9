#pragma once

#include "heatflow/mixtures.hpp"
#include "heatflow/numerics.hpp"

namespace heatflow {

/// Quadrature paths refuse point-mass initial models below this time: the
/// evolved density is numerically singular there.
inline constexpr double kPointMassTimeFloor = 1e-6;

/// Entropy (nats), Fisher information and second-order Fisher information of
/// a smooth model. One-dimensional models are integrated directly; models in
/// higher dimension must reduce to one axis (collinear centers, shared
/// variance) and otherwise raise Unsupported.
ErrorEstimate entropy(const MixtureModel& model, const QuadratureSpec& spec);
ErrorEstimate fisher(const MixtureModel& model, const QuadratureSpec& spec);
ErrorEstimate fisher2(const MixtureModel& model, const QuadratureSpec& spec);

/// I(X_0;X_t) = H(X_t) - (n/2) log(2 pi e t).
ErrorEstimate mutual_info(const MixtureModel& initial, double t,
                          const QuadratureSpec& spec);
/// J(X_0;X_t) = n/t - J(X_t).
ErrorEstimate mutual_fisher(const MixtureModel& initial, double t,
                            const QuadratureSpec& spec);
/// K(X_0;X_t) = n/t^2 - K(X_t). No sign guarantee.
ErrorEstimate mutual_fisher2(const MixtureModel& initial, double t,
                             const QuadratureSpec& spec);

struct MutualTriple {
  ErrorEstimate info;     // I(X_0;X_t)
  ErrorEstimate fisher;   // J(X_0;X_t)
  ErrorEstimate fisher2;  // K(X_0;X_t)
};

/// The three mutual quantities of a symmetric pair of point masses at +-a,
/// as expectations over V_u = N(u, u) with u = ||a||^2 / t.
MutualTriple two_point_closed_form(double a_norm_sq, double t,
                                   const QuadratureSpec& spec);

/// Same for (1/2)N(-a, sI) + (1/2)N(a, sI) in R^n, u = ||a||^2 / (s + t).
MutualTriple two_gaussian_closed_form(double a_norm_sq, double s, double t, int n,
                                      const QuadratureSpec& spec);

/// Quadrature route (1-D or axis-reducible models).
MutualTriple mutual_functionals_by_quadrature(const MixtureModel& initial, double t,
                                              const QuadratureSpec& spec);

/// Closed form for an equal-weight, equal-variance pair in any dimension;
/// quadrature otherwise.
MutualTriple mutual_functionals(const MixtureModel& initial, double t,
                                const QuadratureSpec& spec);

struct ReverseFisher {
  double j_rev;  // J(X_t;X_0) = n/t
  double k_rev;  // K(X_t;X_0) = n/t^2 + 2 J(X_0)/t; +inf for atoms
};

ReverseFisher reverse_mutual_fisher(double t, const MixtureModel& initial,
                                    const QuadratureSpec& spec);

/// J(X_0|X_t) - J(X_0) and K(X_0|X_t) - K(X_0) with the conditional
/// quantities integrated over the joint law of (X_0, X_t). One-dimensional
/// smooth initial models only.
struct ReverseFisherEstimate {
  ErrorEstimate j_rev;
  ErrorEstimate k_rev;
};

ReverseFisherEstimate reverse_mutual_fisher_by_quadrature(const MixtureModel& initial,
                                                          double t,
                                                          const QuadratureSpec& spec);

/// Backward (statistical) information of X_0 given X_t for a point-mass
/// initial model, where the posterior Hessian equals Cov(X_0 | X_t = y)/t^2.
struct BackwardInfo {
  double phi = 0.0;        // E[tr Cov] / t^2
  double psi = 0.0;        // E[||Cov||_HS^2] / t^4
  double var_cond = 0.0;   // Var(X_0 | X_t) = E[tr Cov]
  double cov_hs_sq = 0.0;  // E[||Cov||_HS^2]
  double var_cond_err = 0.0;
  double cov_hs_sq_err = 0.0;
};

BackwardInfo backward_info(const MixtureModel& initial, double t,
                           const QuadratureSpec& spec);

/// 2 E[<-Hess log rho_t(X_t), Cov(X_0|X_t)/t^2>_HS]: the cross term that,
/// added to psi, gives K(X_0;X_t). Point-mass initial models.
ErrorEstimate backward_cross_term(const MixtureModel& initial, double t,
                                  const QuadratureSpec& spec);

/// Var(X_0 | X_t) for any smooth or point-mass initial mixture, from the
/// closed-form posterior (a Gaussian mixture) integrated over X_t.
ErrorEstimate conditional_variance(const MixtureModel& initial, double t,
                                   const QuadratureSpec& spec);

/// J(X_0 | X_t) = J(X_0) + n/t; +inf for point-mass initial models.
double conditional_fisher(const MixtureModel& initial, double t,
                          const QuadratureSpec& spec);

/// J(X_0 | X_t) from its definition as an expectation over (X_0, X_t):
/// outer adaptive quadrature in x, inner Gauss-Hermite in y.
ErrorEstimate conditional_fisher_by_quadrature(const MixtureModel& initial, double t,
                                               const QuadratureSpec& spec);

/// H, J, K of X_t and the mutual triple at one time point.
struct InfoFunctionals {
  double t = 0.0;
  ErrorEstimate entropy;
  ErrorEstimate fisher;
  ErrorEstimate fisher2;
  ErrorEstimate info;
  ErrorEstimate mutual_fisher;
  ErrorEstimate mutual_fisher2;
};

InfoFunctionals info_functionals(const MixtureModel& initial, double t,
                                 const QuadratureSpec& spec);

}  // namespace heatflow
