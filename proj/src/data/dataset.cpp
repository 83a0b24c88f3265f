#include "delco/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "delco/data/random.hpp"

namespace delco {

LabeledDataset::LabeledDataset(FeatureMatrix features, std::vector<int> labels, int num_classes)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size())
    throw std::invalid_argument("dataset: feature rows (" + std::to_string(features_.rows()) +
                                ") != label count (" + std::to_string(labels_.size()) + ")");
  if (features_.cols() < 1) throw std::invalid_argument("dataset: need at least one feature");
  if (num_classes_ < 2) throw std::invalid_argument("dataset: need at least two classes");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= num_classes_)
      throw std::invalid_argument("dataset: label " + std::to_string(labels_[i]) + " at row " +
                                  std::to_string(i) + " outside [0, " +
                                  std::to_string(num_classes_) + ")");
  }
}

std::span<const double> LabeledDataset::row(std::size_t i) const {
  return {features_.data() + i * static_cast<std::size_t>(features_.cols()),
          static_cast<std::size_t>(features_.cols())};
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes_, 0);
  for (int y : labels_) ++counts[y];
  return counts;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw std::out_of_range("dataset: subset row out of range");
    x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
    y[r] = labels_[rows[r]];
  }
  return LabeledDataset(std::move(x), std::move(y), num_classes_);
}

LabeledDataset LabeledDataset::concat(std::span<const LabeledDataset> parts) {
  if (parts.empty()) throw std::invalid_argument("dataset: concat of nothing");
  const auto d = parts.front().features_.cols();
  const int classes = parts.front().num_classes_;
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.features_.cols() != d || p.num_classes_ != classes)
      throw std::invalid_argument("dataset: concat of incompatible datasets");
    rows += p.features_.rows();
  }
  FeatureMatrix x(rows, d);
  std::vector<int> y;
  y.reserve(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    x.middleRows(at, p.features_.rows()) = p.features_;
    at += p.features_.rows();
    y.insert(y.end(), p.labels_.begin(), p.labels_.end());
  }
  return LabeledDataset(std::move(x), std::move(y), classes);
}

bool operator==(const LabeledDataset& a, const LabeledDataset& b) {
  return a.num_classes_ == b.num_classes_ && a.labels_ == b.labels_ &&
         a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
         a.features_ == b.features_;
}

PartitionPlan::PartitionPlan(std::vector<int> assignments, int num_nodes)
    : assignments_(std::move(assignments)), num_nodes_(num_nodes) {
  if (num_nodes_ < 1) throw std::invalid_argument("partition: need at least one node");
  std::vector<std::size_t> seen(num_nodes_, 0);
  for (int node : assignments_) {
    if (node < 0 || node >= num_nodes_)
      throw std::invalid_argument("partition: node index " + std::to_string(node) +
                                  " out of range");
    ++seen[node];
  }
  for (int k = 0; k < num_nodes_; ++k) {
    if (seen[k] == 0)
      throw std::invalid_argument("partition: node " + std::to_string(k) + " receives no example");
  }
}

std::vector<std::size_t> PartitionPlan::members(int node) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignments_.size(); ++i)
    if (assignments_[i] == node) rows.push_back(i);
  return rows;
}

std::vector<LabeledDataset> split_by_plan(const LabeledDataset& data, const PartitionPlan& plan) {
  if (plan.size() != data.size())
    throw std::invalid_argument("partition: plan size does not match dataset size");
  std::vector<LabeledDataset> parts;
  parts.reserve(plan.num_nodes());
  for (int k = 0; k < plan.num_nodes(); ++k) parts.push_back(data.subset(plan.members(k)));
  return parts;
}

DataSplit split_validation(const LabeledDataset& data, std::size_t n_val, std::uint64_t seed,
                           ClassCoverage coverage) {
  if (n_val > data.size())
    throw std::invalid_argument("split: n_val (" + std::to_string(n_val) +
                                ") exceeds dataset size (" + std::to_string(data.size()) + ")");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<long>(n_val));
  std::vector<std::size_t> train_rows(order.begin() + static_cast<long>(n_val), order.end());
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  auto val = data.subset(val_rows);
  if (coverage == ClassCoverage::kRequireAll) {
    const auto counts = val.class_counts();
    for (int y = 0; y < data.num_classes(); ++y) {
      if (counts[y] == 0)
        throw std::runtime_error("split: class " + std::to_string(y) +
                                 " is absent from the validation set");
    }
  }
  return DataSplit{data.subset(train_rows), std::move(val), std::move(train_rows),
                   std::move(val_rows)};
}

DataSplit train_val_split(const LabeledDataset& data, double val_fraction, std::uint64_t seed,
                          ClassCoverage coverage) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("split: validation fraction must lie in (0, 1)");
  const auto n_val =
      static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(data.size())));
  return split_validation(data, n_val, seed, coverage);
}

double accuracy(std::span<const int> predictions, const LabeledDataset& data) {
  if (predictions.size() != data.size())
    throw std::invalid_argument("accuracy: prediction count does not match dataset size");
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) hits += predictions[i] == data.label(i);
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace delco
