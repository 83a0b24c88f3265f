#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "delco/data/dataset.hpp"
#include "delco/data/synthetic.hpp"
#include "delco/harness/stats.hpp"

namespace delco {

enum class Method {
  kSelection,
  kBest,  // peeks at the test set: reference only
  kWeightedVote,
  kStacking,
  kIndependent,
  kDelco,
  kCentralized,
};

Method parse_method(std::string_view name);
std::string_view method_name(Method method);
std::vector<Method> all_methods();

struct MethodSummary {
  Method method;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::vector<double> samples;
};

struct ExperimentReport {
  std::string title;
  nlohmann::json config;
  std::size_t repetitions = 0;  // accuracy samples per method
  std::vector<MethodSummary> methods;
  std::vector<double> lambda_hat;  // one per run, when DELCO was fitted
  std::size_t cap_stops = 0;       // evaluations that hit the draw cap
  // Network totals per run (protocol-based experiments only).
  std::vector<std::size_t> traced_bytes;
  std::vector<std::size_t> predicted_bytes;

  const MethodSummary* find(Method method) const;
};

/// method,mean,std,reps
void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_report_table(std::ostream& out, const ExperimentReport& report);

struct SyntheticConfig {
  SyntheticProcess process = SyntheticProcess::kBlobs;
  std::size_t n_train = 400;
  std::size_t repetitions = 50;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 0;
  CiOptions ci{};
  double val_fraction = 0.1;
  int grid_points = 101;
  bool retrain = true;
  unsigned threads = 1;

  nlohmann::json to_json() const;
};

/// Per repetition: draw a training set, split it into the process's fixed
/// feature-space regions, fit every method and estimate its accuracy on a
/// fresh test stream until the confidence interval is short enough.
ExperimentReport run_synthetic_experiment(const SyntheticConfig& config);

struct RealConfig {
  std::string dataset = "dataset";
  int m = 10;
  std::size_t shuffles = 5;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 0;
  double val_fraction = 0.1;
  int grid_points = 101;
  std::vector<std::size_t> clone_positions;  // non-empty: cloned-dependency variant
  unsigned threads = 1;

  nlohmann::json to_json() const;
};

/// Per shuffle: random permutation and 2-fold cross validation. In each fold
/// the training half is split per class along its top principal direction
/// into m nodes, the decentralized methods run through the network protocol,
/// and every method is scored on the held-out half. Each fold is one sample.
ExperimentReport run_real_experiment(const LabeledDataset& data, const RealConfig& config);

struct CloneReport {
  ExperimentReport cloned;
  ExperimentReport plain;  // same shuffles and folds without cloning
};

/// m = 10; six members replaced by one shared majority vote (positions
/// 0..5 unless configured).
CloneReport run_clone_experiment(const LabeledDataset& data, const RealConfig& config);

}  // namespace delco
