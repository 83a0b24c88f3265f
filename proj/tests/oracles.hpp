// Reference implementations used only by the tests. They trade speed for
// independence from the library's own numerics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using real = long double;

/// Phi(x) from the all-positive series
///   erf(t) = 2/sqrt(pi) e^{-t^2} sum_n 2^n t^{2n+1} / (1*3*...*(2n+1))
/// in the body, and Laplace's continued fraction for the Mills ratio in the
/// far tails (where 1 - erf would cancel).
inline real normal_cdf(real x) {
  const real pi = 3.14159265358979323846264338327950288L;
  if (x < -3.0L || x > 3.0L) {
    const real a = std::fabs(x);
    real frac = a;  // a + 1/(a + 2/(a + 3/(a + ...)))
    for (int k = 400; k >= 1; --k) frac = a + k / frac;
    const real tail = std::exp(-a * a / 2) / std::sqrt(2 * pi) / frac;
    return x < 0 ? tail : 1 - tail;
  }
  const real t = std::fabs(x) / std::sqrt(2.0L);
  real term = t, sum = t;
  for (int n = 1; n < 400; ++n) {
    term *= 2 * t * t / (2 * n + 1);
    sum += term;
    if (term < 1e-30L * sum) break;
  }
  const real erf = 2 / std::sqrt(pi) * std::exp(-t * t) * sum;
  return x < 0 ? (1 - erf) / 2 : (1 + erf) / 2;
}

/// Q(p) by bisection on normal_cdf.
inline real normal_quantile(real p) {
  real lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const real mid = (lo + hi) / 2;
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

/// Copula log-density through a dense correlation matrix and LU.
inline double dense_copula_log_density(double lambda, std::span<const double> v) {
  const int m = static_cast<int>(v.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(m, m, lambda);
  r.diagonal().setOnes();
  Eigen::Map<const Eigen::VectorXd> vv(v.data(), m);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(r);
  const Eigen::MatrixXd inv = lu.inverse() - Eigen::MatrixXd::Identity(m, m);
  return -0.5 * std::log(lu.determinant()) - 0.5 * vv.dot(inv * vv);
}

/// Normal score of an upper-corner cumulative, clamped like the library.
inline double score(double u) {
  const double eps = 1e-12;
  u = std::min(std::max(u, eps), 1.0 - eps);
  if (u > 0.5) return -static_cast<double>(normal_quantile(static_cast<real>(1.0 - u)));
  return static_cast<double>(normal_quantile(u));
}

/// Explicit parameter set: gamma[y], theta[k][y][j].
struct Params {
  int m;
  int l;
  std::vector<double> gamma;
  std::vector<std::vector<std::vector<double>>> theta;
};

inline Params random_params(int m, int l, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Params p{m, l, std::vector<double>(l), {}};
  double s = 0;
  for (auto& g : p.gamma) s += (g = u(rng));
  for (auto& g : p.gamma) g /= s;
  p.theta.assign(m, std::vector<std::vector<double>>(l, std::vector<double>(l)));
  for (auto& tk : p.theta)
    for (auto& row : tk) {
      double t = 0;
      for (auto& x : row) t += (x = u(rng));
      for (auto& x : row) x /= t;
    }
  return p;
}

/// p(y | z) by enumerating gamma_y * cop(F(z)) * prod theta over every class,
/// with the dense copula and the oracle quantile.
inline std::vector<double> posterior(const Params& p, std::span<const int> z, double lambda) {
  std::vector<double> w(p.l);
  for (int y = 0; y < p.l; ++y) {
    std::vector<double> v(p.m);
    double logp = std::log(p.gamma[y]);
    for (int k = 0; k < p.m; ++k) {
      double f = 0;
      for (int j = 0; j <= z[k]; ++j) f += p.theta[k][y][j];
      v[k] = score(f);
      logp += std::log(p.theta[k][y][z[k]]);
    }
    if (p.m >= 2) logp += dense_copula_log_density(lambda, v);
    w[y] = logp;
  }
  const double top = *std::max_element(w.begin(), w.end());
  double s = 0;
  for (auto& x : w) s += (x = std::exp(x - top));
  for (auto& x : w) x /= s;
  return w;
}

/// Regularised incomplete beta by composite Simpson integration of the beta
/// density on a fine grid, returned as a table over x = i / n.
inline std::vector<double> beta_cdf_table(double a, double b, int n) {
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto dens = [&](double x) -> double {
    if (x <= 0) return a == 1 ? std::exp(-lbeta) : 0.0;
    if (x >= 1) return b == 1 ? std::exp(-lbeta) : 0.0;
    return std::exp((a - 1) * std::log(x) + (b - 1) * std::log1p(-x) - lbeta);
  };
  std::vector<double> cdf(n + 1, 0.0);
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const double x0 = i * h;
    cdf[i + 1] = cdf[i] + h / 6 * (dens(x0) + 4 * dens(x0 + h / 2) + dens(x0 + h));
  }
  return cdf;
}

/// Inverse of the tabulated cdf with linear interpolation inside a cell.
inline double beta_quantile(double q, double a, double b, int n = 1 << 20) {
  const auto cdf = beta_cdf_table(a, b, n);
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
  if (it == cdf.begin()) return 0.0;
  if (it == cdf.end()) return 1.0;
  const auto i = static_cast<std::size_t>(it - cdf.begin());
  const double t = (q - cdf[i - 1]) / (cdf[i] - cdf[i - 1]);
  return (static_cast<double>(i - 1) + t) / n;
}

/// Mean softmax cross-entropy in long double; w is l x (d+1), bias last.
inline real cross_entropy(const Eigen::MatrixXd& w, const std::vector<std::vector<double>>& x,
                          const std::vector<int>& y) {
  real total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<real> logit(w.rows());
    for (int c = 0; c < w.rows(); ++c) {
      real s = w(c, w.cols() - 1);
      for (std::size_t j = 0; j < x[i].size(); ++j) s += w(c, static_cast<int>(j)) * x[i][j];
      logit[c] = s;
    }
    const real top = *std::max_element(logit.begin(), logit.end());
    real z = 0;
    for (auto v : logit) z += std::exp(v - top);
    total += top + std::log(z) - logit[y[i]];
  }
  return total / static_cast<real>(x.size());
}

}  // namespace oracle
