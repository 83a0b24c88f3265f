#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "delco/bytes.hpp"
#include "delco/learner/classifier.hpp"

namespace delco {

/// Raw validation counts: class totals and, per classifier, the confusion
/// counts[k][y][j] = #{i : y_i = y, z_ik = j}. Counts from disjoint
/// validation sets add up exactly.
class OutputCounts {
 public:
  OutputCounts(int num_classifiers, int num_classes);

  int num_classifiers() const { return m_; }
  int num_classes() const { return l_; }

  void add(std::span<const int> z, int y);
  OutputCounts& operator+=(const OutputCounts& other);

  std::uint64_t class_count(int y) const { return class_counts_[y]; }
  std::uint64_t confusion(int k, int y, int j) const { return joint_[index(k, y, j)]; }
  std::uint64_t& class_count(int y) { return class_counts_[y]; }
  std::uint64_t& confusion(int k, int y, int j) { return joint_[index(k, y, j)]; }
  std::uint64_t total() const;

  friend bool operator==(const OutputCounts&, const OutputCounts&) = default;

 private:
  std::size_t index(int k, int y, int j) const {
    return (static_cast<std::size_t>(k) * l_ + y) * l_ + j;
  }
  int m_;
  int l_;
  std::vector<std::uint64_t> class_counts_;
  std::vector<std::uint64_t> joint_;
};

OutputCounts count_outputs(const PredictionMatrix& z, std::span<const int> labels, int num_classes);

/// Class prior gamma, per-classifier conditional output distributions
/// theta[k][y][j] = p(c_k = j | y) and their cumulatives F_{k,y}(j).
/// Also caches logs and the normal scores Q(clamp(F)) used by the copula.
class OutputModel {
 public:
  /// Add-one (Laplace) smoothing of the counts.
  explicit OutputModel(const OutputCounts& counts);

  /// Direct parameters; gamma sums to one, theta is m*l*l laid out [k][y][j]
  /// with each (k, y) row summing to one, everything strictly positive.
  static OutputModel from_parameters(std::vector<double> gamma, std::vector<double> theta,
                                     int num_classifiers);

  int num_classifiers() const { return m_; }
  int num_classes() const { return l_; }

  double gamma(int y) const { return gamma_[y]; }
  double theta(int k, int y, int j) const { return theta_[index(k, y, j)]; }
  double cumulative(int k, int y, int j) const { return cumulative_[index(k, y, j)]; }
  double log_gamma(int y) const { return log_gamma_[y]; }
  double log_theta(int k, int y, int j) const { return log_theta_[index(k, y, j)]; }
  /// Q(clamp(F_{k,y}(j))).
  double normal_score(int k, int y, int j) const { return score_[index(k, y, j)]; }

  const std::vector<double>& gamma_vector() const { return gamma_; }
  const std::vector<double>& theta_tensor() const { return theta_; }

  friend bool operator==(const OutputModel& a, const OutputModel& b) {
    return a.m_ == b.m_ && a.l_ == b.l_ && a.gamma_ == b.gamma_ && a.theta_ == b.theta_;
  }

 private:
  OutputModel(int m, int l, std::vector<double> gamma, std::vector<double> theta);
  std::size_t index(int k, int y, int j) const {
    return (static_cast<std::size_t>(k) * l_ + y) * l_ + j;
  }

  int m_;
  int l_;
  std::vector<double> gamma_;
  std::vector<double> theta_;
  std::vector<double> cumulative_;
  std::vector<double> log_gamma_;
  std::vector<double> log_theta_;
  std::vector<double> score_;
};

OutputModel fit_output_model(const PredictionMatrix& z, std::span<const int> labels, int num_classes);

/// gamma (l reals) then theta (m*l*l reals).
void encode(ByteWriter& out, const OutputModel& model);
OutputModel decode_output_model(ByteReader& in, int num_classifiers, int num_classes);

}  // namespace delco
