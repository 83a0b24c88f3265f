#include "delco/harness/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace delco {
namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(x, a, b) / a;
  return 1.0 - front * beta_fraction(1.0 - x, b, a) / b;
}

double beta_quantile(double q, double a, double b, double tolerance) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("beta_quantile: q must lie in [0, 1]");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(mid, a, b) < q) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("clopper_pearson: need at least one trial");
  if (successes > trials) throw std::invalid_argument("clopper_pearson: successes exceed trials");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clopper_pearson: confidence must lie in (0, 1)");
  const double alpha = 1.0 - confidence;
  const double s = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  const double low = successes == 0 ? 0.0 : beta_quantile(alpha / 2.0, s, n - s + 1.0);
  const double high = successes == trials ? 1.0 : beta_quantile(1.0 - alpha / 2.0, s + 1.0, n - s);
  return {low, high};
}

AccuracyEstimate estimate_until_ci(const BatchOutcome& outcome, const CiOptions& options) {
  if (!(options.target_length > 0.0)) throw std::invalid_argument("estimate_until_ci: target must be positive");
  if (options.batch == 0) throw std::invalid_argument("estimate_until_ci: batch must be positive");
  AccuracyEstimate est;
  est.confidence = options.confidence;
  for (std::size_t b = 0;; ++b) {
    const std::size_t size = std::min(options.batch, options.cap - est.trials);
    est.successes += outcome(b, size);
    est.trials += size;
    const auto ci = clopper_pearson(est.successes, est.trials, options.confidence);
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    if (ci.length() < options.target_length) {
      est.stop = StopReason::kTarget;
      break;
    }
    if (est.trials >= options.cap) {
      est.stop = StopReason::kCap;
      break;
    }
  }
  est.point = static_cast<double>(est.successes) / static_cast<double>(est.trials);
  return est;
}

std::vector<AccuracyEstimate> eval_many_until_ci(std::span<const PredictFn> predictors,
                                                 const TestBatch& batches, const CiOptions& options) {
  if (!(options.target_length > 0.0)) throw std::invalid_argument("eval_until_ci: target must be positive");
  if (options.batch == 0 || options.cap == 0) throw std::invalid_argument("eval_until_ci: batch and cap must be positive");
  std::vector<AccuracyEstimate> est(predictors.size());
  std::vector<bool> running(predictors.size(), true);
  std::size_t active = predictors.size();
  for (auto& e : est) e.confidence = options.confidence;

  for (std::size_t b = 0; active > 0; ++b) {
    const std::size_t used = options.batch * b;
    const std::size_t size = std::min(options.batch, options.cap - used);
    const LabeledDataset test = batches(b, size);
    for (std::size_t p = 0; p < predictors.size(); ++p) {
      if (!running[p]) continue;
      auto& e = est[p];
      for (std::size_t i = 0; i < test.size(); ++i) e.successes += predictors[p](test.row(i)) == test.label(i);
      e.trials += test.size();
      const auto ci = clopper_pearson(e.successes, e.trials, options.confidence);
      e.ci_low = ci.low;
      e.ci_high = ci.high;
      e.point = static_cast<double>(e.successes) / static_cast<double>(e.trials);
      if (ci.length() < options.target_length) {
        e.stop = StopReason::kTarget;
      } else if (e.trials >= options.cap) {
        e.stop = StopReason::kCap;
      } else {
        continue;
      }
      running[p] = false;
      --active;
    }
  }
  return est;
}

AccuracyEstimate eval_until_ci(const PredictFn& predictor, const TestBatch& batches,
                               const CiOptions& options) {
  return eval_many_until_ci(std::span<const PredictFn>(&predictor, 1), batches, options).front();
}

std::pair<double, double> mean_and_std(std::span<const double> samples) {
  if (samples.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size());
  return {mean, std::sqrt(var)};
}

}  // namespace delco
