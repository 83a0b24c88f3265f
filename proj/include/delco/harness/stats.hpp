#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "delco/data/dataset.hpp"

namespace delco {

/// Regularised incomplete beta function I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double x, double a, double b);

/// Inverse of I_x(a, b) in x, by bisection to `tolerance`.
double beta_quantile(double q, double a, double b, double tolerance = 1e-10);

struct Interval {
  double low;
  double high;
  double length() const { return high - low; }
};

/// Exact (Clopper-Pearson) two-sided binomial interval.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence);

enum class StopReason { kTarget, kCap };

struct AccuracyEstimate {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double confidence = 0.95;
  StopReason stop = StopReason::kTarget;
};

struct CiOptions {
  double target_length = 0.01;
  double confidence = 0.95;
  std::size_t batch = 1000;
  std::size_t cap = 2'000'000;
};

/// Successes observed in batch number `batch_index` of `batch_size` trials.
using BatchOutcome = std::function<std::size_t(std::size_t batch_index, std::size_t batch_size)>;

/// Draws batches until the interval is shorter than the target or `cap`
/// trials have been used.
AccuracyEstimate estimate_until_ci(const BatchOutcome& outcome, const CiOptions& options);

using TestBatch = std::function<LabeledDataset(std::size_t batch_index, std::size_t batch_size)>;
using PredictFn = std::function<int(std::span<const double>)>;

/// Evaluates several predictors on one shared stream of test batches; each
/// predictor stops on its own once its interval is short enough.
std::vector<AccuracyEstimate> eval_many_until_ci(std::span<const PredictFn> predictors,
                                                 const TestBatch& batches, const CiOptions& options);

AccuracyEstimate eval_until_ci(const PredictFn& predictor, const TestBatch& batches,
                               const CiOptions& options);

/// Population mean and standard deviation (divide by N; 0 for one sample).
std::pair<double, double> mean_and_std(std::span<const double> samples);

}  // namespace delco
