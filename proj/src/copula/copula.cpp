#include "delco/copula/copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "delco/copula/normal.hpp"

namespace delco {

double clamp_probability(double u) { return std::clamp(u, kClampEpsilon, 1.0 - kClampEpsilon); }

bool EquicorrelationCopula::valid(double lambda, int arity) {
  return arity >= 2 && std::isfinite(lambda) && lambda > lower_bound(arity) && lambda < 1.0;
}

EquicorrelationCopula::EquicorrelationCopula(double lambda, int arity)
    : lambda_(lambda), arity_(arity) {
  if (arity < 2) throw std::invalid_argument("copula: arity must be at least 2");
  if (!valid(lambda, arity))
    throw std::invalid_argument("copula: lambda " + std::to_string(lambda) +
                                " outside (" + std::to_string(lower_bound(arity)) + ", 1)");
  const double mm1 = static_cast<double>(arity - 1);
  log_det_ = mm1 * std::log1p(-lambda) + std::log1p(mm1 * lambda);
  inv_scale_ = 1.0 / (1.0 - lambda);
  shrink_ = lambda / (1.0 + mm1 * lambda);
}

double EquicorrelationCopula::log_density_scores(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != arity_)
    throw std::invalid_argument("copula: expected " + std::to_string(arity_) + " scores");
  if (lambda_ == 0.0) return 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : v) {
    sum += x;
    sum_sq += x * x;
  }
  const double quad = inv_scale_ * (sum_sq - shrink_ * sum * sum) - sum_sq;
  const double out = -0.5 * log_det_ - 0.5 * quad;
  if (!std::isfinite(out)) throw std::runtime_error("copula: non-finite log-density");
  return out;
}

double EquicorrelationCopula::log_density(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != arity_)
    throw std::invalid_argument("copula: expected " + std::to_string(arity_) + " probabilities");
  if (lambda_ == 0.0) return 0.0;
  std::vector<double> v(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) v[k] = std_normal_quantile(clamp_probability(u[k]));
  return log_density_scores(v);
}

std::vector<double> lambda_grid(int m, int points, double shrink) {
  if (m < 2) throw std::invalid_argument("lambda_grid: m must be at least 2");
  if (points < 2) throw std::invalid_argument("lambda_grid: need at least two points");
  const double lo = EquicorrelationCopula::lower_bound(m);
  const double width = 1.0 - lo;
  const double first = lo + shrink * width;
  const double last = 1.0 - shrink * width;
  const double step = (last - first) / static_cast<double>(points - 1);

  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    double v = i + 1 == points ? last : first + step * i;
    if (std::abs(v) < 1e-12 * width) v = 0.0;
    grid[static_cast<std::size_t>(i)] = v;
  }
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
    grid.insert(std::upper_bound(grid.begin(), grid.end(), 0.0), 0.0);
  }
  return grid;
}

}  // namespace delco
