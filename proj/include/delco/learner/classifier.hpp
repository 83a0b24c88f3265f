#pragma once

#include <concepts>
#include <memory>
#include <span>
#include <vector>

#include "delco/data/dataset.hpp"
#include "delco/learner/logreg.hpp"

namespace delco {

template <typename T>
concept Predictor = requires(const T& p, std::span<const double> x) {
  { p.predict(x) } -> std::convertible_to<int>;
  { p.num_classes() } -> std::convertible_to<int>;
  { p.input_dim() } -> std::convertible_to<int>;
};

/// Shared, immutable handle to any base predictor. Copies refer to the same
/// underlying model, so two positions of an ensemble may hold literally the
/// same combiner.
class Classifier {
 public:
  template <Predictor T>
    requires(!std::same_as<std::remove_cvref_t<T>, Classifier>)
  Classifier(T model)  // NOLINT(google-explicit-constructor)
      : self_(std::make_shared<const Holder<T>>(std::move(model))) {}

  int predict(std::span<const double> x) const { return self_->predict(x); }
  int num_classes() const { return self_->num_classes(); }
  int input_dim() const { return self_->input_dim(); }

  std::vector<int> predict_all(const LabeledDataset& data) const {
    std::vector<int> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
    return out;
  }

  /// Non-null iff the handle wraps a LinearClassifier.
  const LinearClassifier* linear() const { return self_->linear(); }

  bool shares_model_with(const Classifier& other) const { return self_ == other.self_; }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual int predict(std::span<const double> x) const = 0;
    virtual int num_classes() const = 0;
    virtual int input_dim() const = 0;
    virtual const LinearClassifier* linear() const = 0;
  };

  template <typename T>
  struct Holder final : Concept {
    explicit Holder(T m) : model(std::move(m)) {}
    int predict(std::span<const double> x) const override { return model.predict(x); }
    int num_classes() const override { return model.num_classes(); }
    int input_dim() const override { return model.input_dim(); }
    const LinearClassifier* linear() const override {
      if constexpr (std::same_as<T, LinearClassifier>) return &model;
      else return nullptr;
    }
    T model;
  };

  std::shared_ptr<const Concept> self_;
};

/// n x m matrix (row-major) of member predictions on every row of `data`.
class PredictionMatrix {
 public:
  PredictionMatrix(std::size_t rows, int cols) : rows_(rows), cols_(cols), z_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  int cols() const { return cols_; }
  int& at(std::size_t i, int k) { return z_[i * cols_ + k]; }
  int at(std::size_t i, int k) const { return z_[i * cols_ + k]; }
  std::span<const int> row(std::size_t i) const { return {z_.data() + i * cols_, static_cast<std::size_t>(cols_)}; }

 private:
  std::size_t rows_;
  int cols_;
  std::vector<int> z_;
};

PredictionMatrix predict_members(std::span<const Classifier> members, const LabeledDataset& data);
std::vector<int> member_outputs(std::span<const Classifier> members, std::span<const double> x);

}  // namespace delco
