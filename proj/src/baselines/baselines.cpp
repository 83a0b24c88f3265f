#include "delco/baselines/baselines.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace delco {
namespace {

std::size_t first_max(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

void check_members(std::span<const Classifier> members) {
  if (members.empty()) throw std::invalid_argument("baselines: no members");
  for (const auto& c : members)
    if (c.input_dim() != members.front().input_dim() ||
        c.num_classes() != members.front().num_classes())
      throw std::invalid_argument("baselines: members disagree on shape");
}

int tally_vote(std::span<const int> z, std::span<const double> weights, int num_classes) {
  std::vector<double> tally(static_cast<std::size_t>(num_classes), 0.0);
  for (std::size_t k = 0; k < z.size(); ++k) tally[z[k]] += weights.empty() ? 1.0 : weights[k];
  return static_cast<int>(first_max(tally));
}

}  // namespace

std::vector<double> member_accuracies(const PredictionMatrix& z, std::span<const int> labels) {
  if (z.rows() != labels.size())
    throw std::invalid_argument("member_accuracies: row count mismatch");
  std::vector<double> acc(static_cast<std::size_t>(z.cols()), 0.0);
  if (z.rows() == 0) return acc;
  for (int k = 0; k < z.cols(); ++k) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < z.rows(); ++i) hits += z.at(i, k) == labels[i];
    acc[k] = static_cast<double>(hits) / static_cast<double>(z.rows());
  }
  return acc;
}

std::vector<double> member_accuracies(std::span<const Classifier> members, const LabeledDataset& data) {
  return member_accuracies(predict_members(members, data), data.labels());
}

std::size_t classifier_selection(std::span<const Classifier> members, const LabeledDataset& val) {
  check_members(members);
  if (val.empty()) throw std::invalid_argument("classifier_selection: empty validation set");
  return first_max(member_accuracies(members, val));
}

std::size_t best_classifier(std::span<const Classifier> members, const LabeledDataset& test) {
  check_members(members);
  if (test.empty()) throw std::invalid_argument("best_classifier: empty test set");
  return first_max(member_accuracies(members, test));
}

WeightedVoteEnsemble::WeightedVoteEnsemble(std::vector<Classifier> members, std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  check_members(members_);
  if (weights_.size() != members_.size())
    throw std::invalid_argument("weighted vote: one weight per member required");
  for (double w : weights_)
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("weighted vote: weight outside [0, 1]");
}

WeightedVoteEnsemble WeightedVoteEnsemble::fit(std::vector<Classifier> members, const LabeledDataset& val) {
  if (val.empty()) throw std::invalid_argument("weighted vote: empty validation set");
  auto weights = member_accuracies(members, val);
  return WeightedVoteEnsemble(std::move(members), std::move(weights));
}

int WeightedVoteEnsemble::predict_outputs(std::span<const int> z) const {
  return tally_vote(z, weights_, num_classes());
}

int WeightedVoteEnsemble::predict(std::span<const double> x) const {
  return predict_outputs(member_outputs(members_, x));
}

LabeledDataset stacking_features(const PredictionMatrix& z, std::span<const int> labels,
                                 int num_classes, StackingEncoding encoding) {
  const int m = z.cols();
  const int width = encoding == StackingEncoding::kRawIndex ? m : m * num_classes;
  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(z.rows()), width);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int k = 0; k < m; ++k) {
      if (encoding == StackingEncoding::kRawIndex) x(r, k) = z.at(i, k);
      else x(r, k * num_classes + z.at(i, k)) = 1.0;
    }
  }
  return LabeledDataset(std::move(x), std::vector<int>(labels.begin(), labels.end()), num_classes);
}

StackedEnsemble::StackedEnsemble(std::vector<Classifier> members, LinearClassifier second_stage,
                                 StackingEncoding encoding)
    : members_(std::move(members)), second_stage_(std::move(second_stage)), encoding_(encoding) {
  check_members(members_);
  const int m = static_cast<int>(members_.size());
  const int expected = encoding_ == StackingEncoding::kRawIndex ? m : m * members_.front().num_classes();
  if (second_stage_.input_dim() != expected)
    throw std::invalid_argument("stacking: second stage expects " +
                                std::to_string(second_stage_.input_dim()) + " inputs, not " +
                                std::to_string(expected));
}

StackedEnsemble StackedEnsemble::fit(std::vector<Classifier> members, const LabeledDataset& val,
                                     StackingEncoding encoding, const TrainOptions& options) {
  check_members(members);
  if (val.empty()) throw std::invalid_argument("stacking: empty validation set");
  const auto z = predict_members(members, val);
  auto stage = train_logreg(stacking_features(z, val.labels(), val.num_classes(), encoding), options);
  return StackedEnsemble(std::move(members), std::move(stage), encoding);
}

int StackedEnsemble::predict_outputs(std::span<const int> z) const {
  const int l = num_classes();
  std::vector<double> features(static_cast<std::size_t>(second_stage_.input_dim()), 0.0);
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (encoding_ == StackingEncoding::kRawIndex) features[k] = z[k];
    else features[k * l + z[k]] = 1.0;
  }
  return second_stage_.predict(features);
}

int StackedEnsemble::predict(std::span<const double> x) const {
  return predict_outputs(member_outputs(members_, x));
}

MajorityVote::MajorityVote(std::vector<Classifier> members) : members_(std::move(members)) {
  check_members(members_);
}

int MajorityVote::predict(std::span<const double> x) const {
  return tally_vote(member_outputs(members_, x), {}, num_classes());
}

std::vector<Classifier> majority_vote_clone_setup(std::span<const Classifier> members,
                                                  std::span<const std::size_t> clone_positions) {
  if (members.size() != 10) throw std::invalid_argument("clone setup: expected 10 members");
  if (clone_positions.size() != 6) throw std::invalid_argument("clone setup: expected 6 clone positions");
  std::vector<std::size_t> sorted(clone_positions.begin(), clone_positions.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.back() >= members.size())
    throw std::invalid_argument("clone setup: positions must be distinct and in range");

  std::vector<Classifier> voters;
  for (std::size_t p : sorted) voters.push_back(members[p]);
  const Classifier shared = MajorityVote(std::move(voters));

  std::vector<Classifier> out(members.begin(), members.end());
  for (std::size_t p : sorted) out[p] = shared;
  return out;
}

LinearClassifier centralized_train(const LabeledDataset& full_train, const TrainOptions& options) {
  return train_logreg(full_train, options);
}

}  // namespace delco
