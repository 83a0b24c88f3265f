#include "delco/learner/logreg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace delco {
namespace {

Eigen::MatrixXd with_bias(const LabeledDataset& data) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), data.dim() + 1);
  x.leftCols(data.dim()) = data.features();
  x.col(data.dim()).setOnes();
  return x;
}

// Mean cross-entropy on a bias-augmented design matrix.
double loss_on(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& xb, const std::vector<int>& y,
               Eigen::MatrixXd* gradient) {
  const Eigen::Index n = xb.rows();
  if (n == 0) {
    if (gradient) gradient->setZero(weights.rows(), weights.cols());
    return 0.0;
  }
  Eigen::MatrixXd z = xb * weights.transpose();  // n x classes
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = z.row(i).maxCoeff();
    z.row(i).array() -= top;
    const double log_norm = std::log(z.row(i).array().exp().sum());
    total += log_norm - z(i, y[static_cast<std::size_t>(i)]);
    if (gradient) {
      z.row(i) = (z.row(i).array() - log_norm).exp().matrix();  // softmax
      z(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    }
  }
  if (gradient) *gradient = (z.transpose() * xb) / static_cast<double>(n);
  return total / static_cast<double>(n);
}

}  // namespace

LinearClassifier::LinearClassifier(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() < 1 || weights_.cols() < 2)
    throw std::invalid_argument("linear classifier: weights must be classes x (dim + 1)");
  if (!weights_.allFinite()) throw std::invalid_argument("linear classifier: non-finite weights");
}

LinearClassifier LinearClassifier::zeros(int num_classes, int input_dim) {
  return LinearClassifier(Eigen::MatrixXd::Zero(num_classes, input_dim + 1));
}

Eigen::VectorXd LinearClassifier::logits(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw std::invalid_argument("linear classifier: input has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(input_dim()));
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return weights_.leftCols(input_dim()) * v + weights_.col(input_dim());
}

Eigen::VectorXd LinearClassifier::probabilities(std::span<const double> x) const {
  Eigen::VectorXd z = logits(x);
  z.array() -= z.maxCoeff();
  z = z.array().exp().matrix();
  return z / z.sum();
}

int LinearClassifier::predict(std::span<const double> x) const {
  const Eigen::VectorXd z = logits(x);
  int best = 0;
  for (int c = 1; c < z.size(); ++c)
    if (z[c] > z[best]) best = c;
  return best;
}

std::vector<int> LinearClassifier::predict_all(const LabeledDataset& data) const {
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
  return out;
}

double cross_entropy(const Eigen::MatrixXd& weights, const LabeledDataset& data,
                     Eigen::MatrixXd* gradient) {
  if (weights.rows() != data.num_classes() || weights.cols() != data.dim() + 1)
    throw std::invalid_argument("cross_entropy: weight shape does not match data");
  return loss_on(weights, with_bias(data), data.labels(), gradient);
}

TrainReport train_logreg_report(const LabeledDataset& data, const TrainOptions& options) {
  if (data.empty()) throw std::invalid_argument("train_logreg: empty dataset");
  if (!data.features().allFinite())
    throw std::runtime_error("train_logreg: non-finite feature values");

  const int classes = data.num_classes();
  const auto counts = data.class_counts();
  int present = 0;
  int only = 0;
  for (int c = 0; c < classes; ++c) {
    if (counts[c] > 0) {
      ++present;
      only = c;
    }
  }
  if (present == 1) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(classes, data.dim() + 1);
    w(only, data.dim()) = 1.0;
    return TrainReport{LinearClassifier(std::move(w)), 0, true, {}};
  }

  const Eigen::MatrixXd xb = with_bias(data);
  const auto& y = data.labels();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(classes, data.dim() + 1);
  Eigen::MatrixXd grad;

  auto masked_gradient = [&](Eigen::MatrixXd& g) {
    for (int c = 0; c < classes; ++c)
      if (counts[c] == 0) g.row(c).setZero();
  };

  double loss = loss_on(w, xb, y, &grad);
  if (!std::isfinite(loss)) throw std::runtime_error("train_logreg: non-finite initial loss");
  masked_gradient(grad);

  TrainReport report{LinearClassifier(w), 0, false, {}};
  if (options.record_losses) report.losses.push_back(loss);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (grad.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      report.converged = true;
      break;
    }
    const double slope = grad.squaredNorm();
    double step = options.initial_step;
    bool accepted = false;
    Eigen::MatrixXd trial;
    double trial_loss = 0.0;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      trial = w - step * grad;
      trial_loss = loss_on(trial, xb, y, nullptr);
      if (std::isfinite(trial_loss) && trial_loss <= loss - options.armijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no representable decrease left
    w = std::move(trial);
    loss = loss_on(w, xb, y, &grad);
    if (!std::isfinite(loss))
      throw std::runtime_error("train_logreg: loss became non-finite at iteration " +
                               std::to_string(it));
    masked_gradient(grad);
    if (options.record_losses) report.losses.push_back(loss);
  }
  // Softmax is shift invariant, so centring the present rows keeps their ranking
  // while making max over present logits >= 0 = every absent logit, for all x.
  if (present < classes) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(w.cols());
    for (int c = 0; c < classes; ++c)
      if (counts[c] > 0) mean += w.row(c);
    mean /= present;
    for (int c = 0; c < classes; ++c)
      if (counts[c] > 0) w.row(c) -= mean;
  }
  report.iterations = it;
  report.model = LinearClassifier(std::move(w));
  return report;
}

LinearClassifier train_logreg(const LabeledDataset& data, const TrainOptions& options) {
  return train_logreg_report(data, options).model;
}

void encode(ByteWriter& out, const LinearClassifier& model) {
  out.put_u64(static_cast<std::uint64_t>(model.num_classes()));
  out.put_u64(static_cast<std::uint64_t>(model.input_dim()));
  const auto& w = model.weights();
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) out.put_f64(w(r, c));
}

LinearClassifier decode_linear(ByteReader& in) {
  const auto classes = in.get_u64();
  const auto dim = in.get_u64();
  if (classes < 1 || classes > (1u << 20) || dim > (1u << 24))
    throw std::runtime_error("linear classifier: implausible header");
  Eigen::MatrixXd w(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(dim + 1));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = in.get_f64();
  return LinearClassifier(std::move(w));
}

std::size_t encoded_size(int num_classes, int input_dim) {
  return 16 + 8 * static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(input_dim + 1);
}

}  // namespace delco
