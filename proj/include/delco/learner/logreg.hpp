#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "delco/bytes.hpp"
#include "delco/data/dataset.hpp"

namespace delco {

/// Multinomial logistic regression: one row of weights per class, the last
/// column being the bias. Immutable once built.
class LinearClassifier {
 public:
  /// `weights` is num_classes x (input_dim + 1); every entry must be finite.
  explicit LinearClassifier(Eigen::MatrixXd weights);
  static LinearClassifier zeros(int num_classes, int input_dim);

  int num_classes() const { return static_cast<int>(weights_.rows()); }
  int input_dim() const { return static_cast<int>(weights_.cols()) - 1; }
  const Eigen::MatrixXd& weights() const { return weights_; }

  Eigen::VectorXd logits(std::span<const double> x) const;
  Eigen::VectorXd probabilities(std::span<const double> x) const;

  /// Argmax of the logits, lowest class index on ties.
  int predict(std::span<const double> x) const;
  std::vector<int> predict_all(const LabeledDataset& data) const;

 private:
  Eigen::MatrixXd weights_;
};

struct TrainOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;  // on the max-norm of the gradient
  double initial_step = 1.0;
  double armijo = 1e-4;
  int max_halvings = 60;
  bool record_losses = false;
};

struct TrainReport {
  LinearClassifier model;
  int iterations = 0;
  bool converged = false;
  std::vector<double> losses;  // loss before each step and after the last, when recorded
};

/// Mean cross-entropy of softmax(W [x; 1]); fills `gradient` when non-null.
/// No regularisation term.
double cross_entropy(const Eigen::MatrixXd& weights, const LabeledDataset& data,
                     Eigen::MatrixXd* gradient = nullptr);

/// Full-batch gradient descent from zero weights with a backtracking
/// (Armijo) line search. Rows of classes absent from `data` keep their
/// initial zero weights; with a single class present the result is the
/// constant predictor of that class. Throws std::runtime_error if the loss
/// is not finite.
TrainReport train_logreg_report(const LabeledDataset& data, const TrainOptions& options = {});
LinearClassifier train_logreg(const LabeledDataset& data, const TrainOptions& options = {});

/// Header (num_classes, input_dim) as 8-byte integers, then the weights
/// row-major as 8-byte reals.
void encode(ByteWriter& out, const LinearClassifier& model);
LinearClassifier decode_linear(ByteReader& in);
std::size_t encoded_size(int num_classes, int input_dim);

}  // namespace delco
