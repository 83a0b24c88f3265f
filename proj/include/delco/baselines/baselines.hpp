#pragma once

#include <span>
#include <vector>

#include "delco/bytes.hpp"
#include "delco/data/dataset.hpp"
#include "delco/learner/classifier.hpp"
#include "delco/learner/logreg.hpp"

namespace delco {

/// Per-member accuracy on `data`.
std::vector<double> member_accuracies(std::span<const Classifier> members, const LabeledDataset& data);
std::vector<double> member_accuracies(const PredictionMatrix& z, std::span<const int> labels);

/// Index of the member with the highest validation accuracy (lowest index on ties).
std::size_t classifier_selection(std::span<const Classifier> members, const LabeledDataset& val);

/// Same rule on the test set. Peeks at test labels: a reference, not a
/// deployable method.
std::size_t best_classifier(std::span<const Classifier> members, const LabeledDataset& test);

class WeightedVoteEnsemble {
 public:
  /// Weights are validation accuracies, each in [0, 1].
  WeightedVoteEnsemble(std::vector<Classifier> members, std::vector<double> weights);

  static WeightedVoteEnsemble fit(std::vector<Classifier> members, const LabeledDataset& val);

  int num_classes() const { return members_.front().num_classes(); }
  int input_dim() const { return members_.front().input_dim(); }
  const std::vector<Classifier>& members() const { return members_; }
  const std::vector<double>& weights() const { return weights_; }

  /// argmax_y sum_k w_k [c_k(x) = y], lowest class on ties.
  int predict(std::span<const double> x) const;
  int predict_outputs(std::span<const int> z) const;

 private:
  std::vector<Classifier> members_;
  std::vector<double> weights_;
};

/// How member outputs are presented to the second stage.
enum class StackingEncoding {
  kRawIndex,  // m numeric features, the predicted class indices
  kOneHot,    // m * l indicator features
};

class StackedEnsemble {
 public:
  StackedEnsemble(std::vector<Classifier> members, LinearClassifier second_stage,
                  StackingEncoding encoding);

  /// Second stage trained by logistic regression on (z(x), y) over `val`.
  static StackedEnsemble fit(std::vector<Classifier> members, const LabeledDataset& val,
                             StackingEncoding encoding = StackingEncoding::kRawIndex,
                             const TrainOptions& options = {});

  int num_classes() const { return second_stage_.num_classes(); }
  int input_dim() const { return members_.front().input_dim(); }
  const std::vector<Classifier>& members() const { return members_; }
  const LinearClassifier& second_stage() const { return second_stage_; }
  StackingEncoding encoding() const { return encoding_; }

  int predict(std::span<const double> x) const;
  int predict_outputs(std::span<const int> z) const;

 private:
  std::vector<Classifier> members_;
  LinearClassifier second_stage_;
  StackingEncoding encoding_;
};

/// Second-stage design matrix built from member outputs.
LabeledDataset stacking_features(const PredictionMatrix& z, std::span<const int> labels,
                                 int num_classes, StackingEncoding encoding);

/// Unweighted vote over its members, lowest class on ties.
class MajorityVote {
 public:
  explicit MajorityVote(std::vector<Classifier> members);

  int num_classes() const { return members_.front().num_classes(); }
  int input_dim() const { return members_.front().input_dim(); }
  const std::vector<Classifier>& members() const { return members_; }

  int predict(std::span<const double> x) const;

 private:
  std::vector<Classifier> members_;
};

/// Replaces the members at `clone_positions` (6 of 10) by one shared
/// majority vote over the original members at those positions.
std::vector<Classifier> majority_vote_clone_setup(std::span<const Classifier> members,
                                                  std::span<const std::size_t> clone_positions);

inline constexpr std::size_t kDefaultClonePositions[6] = {0, 1, 2, 3, 4, 5};

/// Logistic regression on the undivided training set.
LinearClassifier centralized_train(const LabeledDataset& full_train, const TrainOptions& options = {});

}  // namespace delco
