#pragma once

#include <filesystem>
#include <span>
#include <variant>

#include "delco/aggregation/ensemble.hpp"
#include "delco/baselines/baselines.hpp"
#include "delco/bytes.hpp"
#include "delco/data/dataset.hpp"
#include "delco/harness/experiment.hpp"
#include "delco/learner/logreg.hpp"

namespace delco {

/// A fitted model of any benchmark method, as written by `delco train`.
struct StoredModel {
  Method method;
  std::variant<LinearClassifier, CopulaEnsemble, WeightedVoteEnsemble, StackedEnsemble> model;

  int predict(std::span<const double> x) const;
  std::vector<int> predict_all(const LabeledDataset& data) const;
  int num_classes() const;
  int input_dim() const;
};

/// Fits `method` on `train` split across nodes by `plan`. Ensemble methods and
/// selection share one DELCO fit; `best` is refused since it needs test labels.
StoredModel fit_method(Method method, const LabeledDataset& train, const PartitionPlan& plan,
                       const DelcoOptions& options);

/// Tagged container: magic, method, then the method's fixed-width payload.
Bytes encode_model(const StoredModel& model);
StoredModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const StoredModel& model);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace delco
