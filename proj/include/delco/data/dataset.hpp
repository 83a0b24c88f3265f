#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace delco {

/// Row-major so that every example is a contiguous span of `dim()` doubles.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Feature matrix plus integer class labels in {0..num_classes-1}.
///
/// Immutable after construction; the constructor enforces the shape and
/// label-range invariants so every downstream stage can rely on them.
class LabeledDataset {
 public:
  LabeledDataset(FeatureMatrix features, std::vector<int> labels, int num_classes);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  int dim() const { return static_cast<int>(features_.cols()); }
  int num_classes() const { return num_classes_; }

  const FeatureMatrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const double> row(std::size_t i) const;

  std::vector<std::size_t> class_counts() const;
  LabeledDataset subset(std::span<const std::size_t> rows) const;

  /// Row-wise concatenation; all parts must agree on dim and num_classes.
  static LabeledDataset concat(std::span<const LabeledDataset> parts);

  friend bool operator==(const LabeledDataset& a, const LabeledDataset& b);

 private:
  FeatureMatrix features_;
  std::vector<int> labels_;
  int num_classes_;
};

/// Assignment of every example to one of `num_nodes` network nodes.
class PartitionPlan {
 public:
  /// Throws if any node index is out of range or receives no example.
  PartitionPlan(std::vector<int> assignments, int num_nodes);

  std::size_t size() const { return assignments_.size(); }
  int num_nodes() const { return num_nodes_; }
  const std::vector<int>& assignments() const { return assignments_; }
  int node_of(std::size_t i) const { return assignments_[i]; }

  std::vector<std::size_t> members(int node) const;

 private:
  std::vector<int> assignments_;
  int num_nodes_;
};

/// One dataset per node, in node order.
std::vector<LabeledDataset> split_by_plan(const LabeledDataset& data, const PartitionPlan& plan);

enum class ClassCoverage {
  kRequireAll,  // every class must appear in the validation part
  kAny,
};

struct DataSplit {
  LabeledDataset train;
  LabeledDataset val;
  std::vector<std::size_t> train_rows;  // row indices into the source, ascending
  std::vector<std::size_t> val_rows;
};

/// Uniform split without replacement drawing exactly `n_val` validation rows.
DataSplit split_validation(const LabeledDataset& data, std::size_t n_val, std::uint64_t seed,
                           ClassCoverage coverage = ClassCoverage::kRequireAll);

/// |val| = round(val_fraction * n).
DataSplit train_val_split(const LabeledDataset& data, double val_fraction, std::uint64_t seed,
                          ClassCoverage coverage = ClassCoverage::kRequireAll);

/// Fraction of rows where `predictions[i] == data.label(i)`.
double accuracy(std::span<const int> predictions, const LabeledDataset& data);

}  // namespace delco
