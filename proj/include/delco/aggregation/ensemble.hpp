#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "delco/aggregation/output_model.hpp"
#include "delco/bytes.hpp"
#include "delco/data/dataset.hpp"
#include "delco/learner/classifier.hpp"

namespace delco {

/// Unnormalised log-posterior of every class given member outputs z:
///   ln gamma_y + sum_k ln theta[k][y][z_k] + ln cop_lambda(F_{1,y}(z_1), ..., F_{m,y}(z_m)).
/// With a single member the copula term is dropped and `lambda` ignored.
/// Throws std::runtime_error naming (k, y) if a score is not finite.
std::vector<double> ensemble_log_scores(const OutputModel& model, std::span<const int> z,
                                        double lambda);

/// Index of the largest value, lowest index on ties.
int argmax_first(std::span<const double> values);

/// Members + fitted output model + copula parameter.
class CopulaEnsemble {
 public:
  CopulaEnsemble(std::vector<Classifier> members, OutputModel model, double lambda_hat);

  int num_classifiers() const { return static_cast<int>(members_.size()); }
  int num_classes() const { return model_.num_classes(); }
  int input_dim() const { return members_.front().input_dim(); }
  double lambda_hat() const { return lambda_hat_; }
  const OutputModel& model() const { return model_; }
  const std::vector<Classifier>& members() const { return members_; }

  int predict(std::span<const double> x) const;
  int predict_outputs(std::span<const int> z) const;
  std::vector<int> predict_all(const LabeledDataset& data) const;

  /// Same members and model, different copula parameter (0 gives the
  /// independent model).
  CopulaEnsemble with_lambda(double lambda) const;
  CopulaEnsemble with_members(std::vector<Classifier> members) const;

 private:
  std::vector<Classifier> members_;
  OutputModel model_;
  double lambda_hat_;
};

/// Number of validation rows classified correctly for each grid value.
std::vector<std::uint64_t> grid_correct_counts(const OutputModel& model, const PredictionMatrix& z,
                                               std::span<const int> labels,
                                               std::span<const double> grid);

/// Argmax of `correct`; ties go to the value closest to 0, then the smaller.
double select_lambda(std::span<const double> grid, std::span<const std::uint64_t> correct);

double grid_search_lambda(const OutputModel& model, const PredictionMatrix& z,
                          std::span<const int> labels, std::span<const double> grid);

/// The grid used when none is given: lambda_grid(m, 101), or {0} for m = 1.
std::vector<double> default_grid(int m, int points = 101);

struct DelcoOptions {
  std::size_t n_val = 0;
  std::vector<double> grid;  // empty: default_grid(m)
  bool retrain = false;
  TrainOptions train;
  std::uint64_t seed = 0;
};

/// Everything the training procedure produced, including the intermediate
/// first-pass members and validation predictions that the baselines reuse.
struct DelcoFit {
  CopulaEnsemble ensemble;
  DataSplit split;
  std::vector<LinearClassifier> first_pass;
  std::vector<LinearClassifier> final_members;  // retrained if requested
  PredictionMatrix val_predictions;
  std::vector<double> grid;
  std::vector<std::uint64_t> grid_correct;
};

/// Aggregation fit on already-trained members: output model from the
/// validation predictions, then grid search.
CopulaEnsemble fit_aggregator(std::vector<Classifier> members, const LabeledDataset& val,
                              std::span<const double> grid);

/// Full training: hold out n_val rows for validation, train member k on the
/// remaining rows of node k, estimate the output model, grid-search lambda,
/// then optionally retrain each member on all of node k's rows (the output
/// model and lambda are kept).
DelcoFit fit_delco_detailed(const LabeledDataset& train, const PartitionPlan& plan,
                            const DelcoOptions& options);
CopulaEnsemble fit_delco(const LabeledDataset& train, const PartitionPlan& plan,
                         const DelcoOptions& options);

/// Header (m, l, lambda) then m linear member blobs, gamma and theta, all 8-byte
/// fields. Throws if a member is not a LinearClassifier.
void encode(ByteWriter& out, const CopulaEnsemble& ensemble);
CopulaEnsemble decode_ensemble(ByteReader& in);

}  // namespace delco
