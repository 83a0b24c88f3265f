#pragma once

#include <span>
#include <vector>

namespace delco {

/// Probabilities are clamped into [eps, 1 - eps] before the normal quantile:
/// the top category evaluates its cumulative at exactly 1.
inline constexpr double kClampEpsilon = 1e-12;

double clamp_probability(double u);

/// Gaussian copula whose correlation matrix has unit diagonal and constant
/// off-diagonal `lambda`, positive definite iff -1/(m-1) < lambda < 1.
class EquicorrelationCopula {
 public:
  EquicorrelationCopula(double lambda, int arity);

  static bool valid(double lambda, int arity);
  static double lower_bound(int arity) { return -1.0 / static_cast<double>(arity - 1); }

  double lambda() const { return lambda_; }
  int arity() const { return arity_; }

  /// ln det R = (m-1) ln(1-lambda) + ln(1+(m-1) lambda).
  double log_det() const { return log_det_; }

  /// ln cop(u) for u in [0,1]^m (clamped), via v_k = Q(u_k).
  double log_density(std::span<const double> u) const;

  /// ln cop evaluated directly on normal scores v:
  /// -1/2 ln det R - 1/2 v^T (R^-1 - I) v, using
  /// R^-1 = (I - c 11^T) / (1 - lambda), c = lambda / (1 + (m-1) lambda).
  double log_density_scores(std::span<const double> v) const;

 private:
  double lambda_;
  int arity_;
  double log_det_;
  double inv_scale_;
  double shrink_;
};

/// `points` evenly spaced values over the open interval (-1/(m-1), 1), both
/// ends pulled in by 1e-3 of its width (`shrink`), with 0 always present.
/// Sorted ascending; size is `points` or `points + 1`.
std::vector<double> lambda_grid(int m, int points, double shrink = 1e-3);

}  // namespace delco
