#include "delco/aggregation/ensemble.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "delco/copula/copula.hpp"

namespace delco {
namespace {

// Scores with a pre-built copula (nullptr for single-member ensembles).
void scores_into(const OutputModel& model, std::span<const int> z,
                 const EquicorrelationCopula* copula, std::vector<double>& scores,
                 std::vector<double>& v) {
  const int m = model.num_classifiers();
  const int l = model.num_classes();
  scores.assign(static_cast<std::size_t>(l), 0.0);
  v.resize(static_cast<std::size_t>(m));
  for (int y = 0; y < l; ++y) {
    double s = model.log_gamma(y);
    for (int k = 0; k < m; ++k) {
      s += model.log_theta(k, y, z[k]);
      v[k] = model.normal_score(k, y, z[k]);
    }
    if (copula != nullptr) s += copula->log_density_scores(v);
    if (!std::isfinite(s)) {
      int bad = 0;
      for (int k = 0; k < m; ++k)
        if (!std::isfinite(model.log_theta(k, y, z[k])) || !std::isfinite(v[k])) bad = k;
      throw std::runtime_error("ensemble: non-finite score at k=" + std::to_string(bad) +
                               ", y=" + std::to_string(y));
    }
    scores[y] = s;
  }
}

std::optional<EquicorrelationCopula> make_copula(int m, double lambda) {
  if (m < 2) return std::nullopt;
  return EquicorrelationCopula(lambda, m);
}

void check_outputs(const OutputModel& model, std::span<const int> z) {
  if (static_cast<int>(z.size()) != model.num_classifiers())
    throw std::invalid_argument("ensemble: expected " + std::to_string(model.num_classifiers()) +
                                " member outputs, got " + std::to_string(z.size()));
  for (int zk : z)
    if (zk < 0 || zk >= model.num_classes())
      throw std::invalid_argument("ensemble: member output out of range");
}

}  // namespace

std::vector<double> ensemble_log_scores(const OutputModel& model, std::span<const int> z,
                                        double lambda) {
  check_outputs(model, z);
  const auto copula = make_copula(model.num_classifiers(), lambda);
  std::vector<double> scores, v;
  scores_into(model, z, copula ? &*copula : nullptr, scores, v);
  return scores;
}

int argmax_first(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

CopulaEnsemble::CopulaEnsemble(std::vector<Classifier> members, OutputModel model, double lambda_hat)
    : members_(std::move(members)), model_(std::move(model)), lambda_hat_(lambda_hat) {
  if (members_.empty()) throw std::invalid_argument("ensemble: no members");
  if (static_cast<int>(members_.size()) != model_.num_classifiers())
    throw std::invalid_argument("ensemble: member count does not match the output model");
  for (const auto& c : members_) {
    if (c.input_dim() != members_.front().input_dim())
      throw std::invalid_argument("ensemble: members disagree on input dimension");
    if (c.num_classes() != model_.num_classes())
      throw std::invalid_argument("ensemble: member class count does not match the model");
  }
  const int m = num_classifiers();
  if (m >= 2 && !EquicorrelationCopula::valid(lambda_hat_, m))
    throw std::invalid_argument("ensemble: lambda " + std::to_string(lambda_hat_) +
                                " outside the admissible interval");
}

int CopulaEnsemble::predict_outputs(std::span<const int> z) const {
  return argmax_first(ensemble_log_scores(model_, z, lambda_hat_));
}

int CopulaEnsemble::predict(std::span<const double> x) const {
  return predict_outputs(member_outputs(members_, x));
}

std::vector<int> CopulaEnsemble::predict_all(const LabeledDataset& data) const {
  const auto copula = make_copula(num_classifiers(), lambda_hat_);
  std::vector<int> out(data.size());
  std::vector<int> z(members_.size());
  std::vector<double> scores, v;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    for (std::size_t k = 0; k < members_.size(); ++k) z[k] = members_[k].predict(x);
    scores_into(model_, z, copula ? &*copula : nullptr, scores, v);
    out[i] = argmax_first(scores);
  }
  return out;
}

CopulaEnsemble CopulaEnsemble::with_lambda(double lambda) const {
  return CopulaEnsemble(members_, model_, lambda);
}

CopulaEnsemble CopulaEnsemble::with_members(std::vector<Classifier> members) const {
  return CopulaEnsemble(std::move(members), model_, lambda_hat_);
}

std::vector<std::uint64_t> grid_correct_counts(const OutputModel& model, const PredictionMatrix& z,
                                               std::span<const int> labels,
                                               std::span<const double> grid) {
  if (z.rows() != labels.size())
    throw std::invalid_argument("grid search: prediction rows do not match label count");
  if (z.cols() != model.num_classifiers())
    throw std::invalid_argument("grid search: prediction columns do not match the model");
  const int l = model.num_classes();

  // The decision only depends on the output pattern, so tally labels per pattern.
  std::map<std::vector<int>, std::vector<std::uint64_t>> patterns;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto row = z.row(i);
    auto& tally = patterns[std::vector<int>(row.begin(), row.end())];
    if (tally.empty()) tally.assign(static_cast<std::size_t>(l), 0);
    ++tally[labels[i]];
  }
  for (const auto& [pattern, tally] : patterns) check_outputs(model, pattern);

  std::vector<std::uint64_t> correct(grid.size(), 0);
  std::vector<double> scores, v;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto copula = make_copula(model.num_classifiers(), grid[g]);
    for (const auto& [pattern, tally] : patterns) {
      scores_into(model, pattern, copula ? &*copula : nullptr, scores, v);
      correct[g] += tally[argmax_first(scores)];
    }
  }
  return correct;
}

double select_lambda(std::span<const double> grid, std::span<const std::uint64_t> correct) {
  if (grid.empty() || grid.size() != correct.size())
    throw std::invalid_argument("select_lambda: grid and counts must be non-empty and aligned");
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (correct[g] > correct[best]) {
      best = g;
    } else if (correct[g] == correct[best]) {
      const double a = std::abs(grid[g]);
      const double b = std::abs(grid[best]);
      if (a < b || (a == b && grid[g] < grid[best])) best = g;
    }
  }
  return grid[best];
}

double grid_search_lambda(const OutputModel& model, const PredictionMatrix& z,
                          std::span<const int> labels, std::span<const double> grid) {
  return select_lambda(grid, grid_correct_counts(model, z, labels, grid));
}

std::vector<double> default_grid(int m, int points) {
  if (m < 2) return {0.0};
  return lambda_grid(m, points);
}

CopulaEnsemble fit_aggregator(std::vector<Classifier> members, const LabeledDataset& val,
                              std::span<const double> grid) {
  const auto z = predict_members(members, val);
  auto model = fit_output_model(z, val.labels(), val.num_classes());
  const double lambda = grid_search_lambda(model, z, val.labels(), grid);
  return CopulaEnsemble(std::move(members), std::move(model), lambda);
}

DelcoFit fit_delco_detailed(const LabeledDataset& train, const PartitionPlan& plan,
                            const DelcoOptions& options) {
  if (plan.size() != train.size())
    throw std::invalid_argument("fit_delco: plan size does not match training set size");
  const int m = plan.num_nodes();
  auto split = split_validation(train, options.n_val, options.seed);

  std::vector<LinearClassifier> first_pass;
  first_pass.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    std::vector<std::size_t> rows;
    for (std::size_t r : split.train_rows)
      if (plan.node_of(r) == k) rows.push_back(r);
    if (rows.empty())
      throw std::runtime_error("fit_delco: node " + std::to_string(k) +
                               " has no training example left after the validation split");
    first_pass.push_back(train_logreg(train.subset(rows), options.train));
  }

  std::vector<Classifier> members(first_pass.begin(), first_pass.end());
  auto z = predict_members(members, split.val);
  auto model = fit_output_model(z, split.val.labels(), train.num_classes());
  auto grid = options.grid.empty() ? default_grid(m) : options.grid;
  auto correct = grid_correct_counts(model, z, split.val.labels(), grid);
  const double lambda = select_lambda(grid, correct);

  std::vector<LinearClassifier> final_members = first_pass;
  if (options.retrain) {
    for (int k = 0; k < m; ++k)
      final_members[k] = train_logreg(train.subset(plan.members(k)), options.train);
    members.assign(final_members.begin(), final_members.end());
  }

  CopulaEnsemble ensemble(std::move(members), std::move(model), lambda);
  return DelcoFit{std::move(ensemble), std::move(split),  std::move(first_pass),
                  std::move(final_members), std::move(z), std::move(grid),
                  std::move(correct)};
}

CopulaEnsemble fit_delco(const LabeledDataset& train, const PartitionPlan& plan,
                         const DelcoOptions& options) {
  return fit_delco_detailed(train, plan, options).ensemble;
}

void encode(ByteWriter& out, const CopulaEnsemble& ensemble) {
  out.put_u64(static_cast<std::uint64_t>(ensemble.num_classifiers()));
  out.put_u64(static_cast<std::uint64_t>(ensemble.num_classes()));
  out.put_f64(ensemble.lambda_hat());
  for (const auto& member : ensemble.members()) {
    const LinearClassifier* linear = member.linear();
    if (linear == nullptr)
      throw std::invalid_argument("ensemble: only linear members can be serialised");
    encode(out, *linear);
  }
  encode(out, ensemble.model());
}

CopulaEnsemble decode_ensemble(ByteReader& in) {
  const auto m = in.get_u64();
  const auto l = in.get_u64();
  if (m < 1 || m > 4096 || l < 2 || l > 4096)
    throw std::runtime_error("ensemble: implausible header");
  const double lambda = in.get_f64();
  std::vector<Classifier> members;
  for (std::uint64_t k = 0; k < m; ++k) members.emplace_back(decode_linear(in));
  auto model = decode_output_model(in, static_cast<int>(m), static_cast<int>(l));
  return CopulaEnsemble(std::move(members), std::move(model), lambda);
}

}  // namespace delco
