#include "delco/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "delco/aggregation/ensemble.hpp"
#include "delco/baselines/baselines.hpp"
#include "delco/data/partition.hpp"
#include "delco/data/random.hpp"
#include "delco/network/protocol.hpp"

namespace delco {
namespace {

// Runs fn(i) for i in [0, n); results must be written by index. The error of
// the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) guarded(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::runtime_error with_context(const std::string& what, std::uint64_t seed, const std::exception& e) {
  return std::runtime_error(what + " (seed " + std::to_string(seed) + ") failed: " + e.what());
}

ExperimentReport summarise(std::string title, nlohmann::json config, const std::vector<Method>& methods,
                           const std::vector<std::vector<double>>& per_run) {
  ExperimentReport report;
  report.title = std::move(title);
  report.config = std::move(config);
  report.repetitions = per_run.size();
  for (std::size_t j = 0; j < methods.size(); ++j) {
    MethodSummary s{methods[j], 0.0, 0.0, {}};
    for (const auto& run : per_run) s.samples.push_back(run[j]);
    std::tie(s.mean, s.std) = mean_and_std(s.samples);
    report.methods.push_back(std::move(s));
  }
  return report;
}

nlohmann::json methods_json(const std::vector<Method>& methods) {
  auto out = nlohmann::json::array();
  for (auto m : methods) out.push_back(method_name(m));
  return out;
}

}  // namespace

Method parse_method(std::string_view name) {
  for (auto m : all_methods())
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kSelection: return "selection";
    case Method::kBest: return "best";
    case Method::kWeightedVote: return "weighted-vote";
    case Method::kStacking: return "stacking";
    case Method::kIndependent: return "indep-copula";
    case Method::kDelco: return "delco";
    case Method::kCentralized: return "centralized";
  }
  return "?";
}

std::vector<Method> all_methods() {
  return {Method::kSelection, Method::kBest,  Method::kWeightedVote, Method::kStacking,
          Method::kIndependent, Method::kDelco, Method::kCentralized};
}

const MethodSummary* ExperimentReport::find(Method method) const {
  for (const auto& m : methods)
    if (m.method == method) return &m;
  return nullptr;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "method,mean,std,reps\n" << std::setprecision(10);
  for (const auto& m : report.methods)
    out << method_name(m.method) << ',' << m.mean << ',' << m.std << ',' << m.samples.size() << '\n';
}

void write_report_table(std::ostream& out, const ExperimentReport& report) {
  out << report.title << "  (" << report.repetitions << " samples per method)\n";
  out << std::left << std::setw(16) << "method" << std::right << std::setw(10) << "mean"
      << std::setw(10) << "std" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& m : report.methods) {
    out << std::left << std::setw(16) << method_name(m.method) << std::right << std::setw(9)
        << 100.0 * m.mean << '%' << std::setw(9) << 100.0 * m.std << '%';
    if (m.method == Method::kBest) out << "   (oracle: uses test labels)";
    out << '\n';
  }
  if (!report.lambda_hat.empty()) {
    const auto [lm, ls] = mean_and_std(report.lambda_hat);
    out << "lambda_hat mean " << std::setprecision(4) << lm << " std " << ls << '\n';
  }
  if (!report.traced_bytes.empty())
    out << "network bytes per run " << report.traced_bytes.front() << " (predicted "
        << report.predicted_bytes.front() << ")\n";
  if (report.cap_stops > 0) out << "evaluations stopped by the draw cap: " << report.cap_stops << '\n';
  out.unsetf(std::ios::fixed);
}

nlohmann::json SyntheticConfig::to_json() const {
  return {{"process", process_name(process)},
          {"n_train", n_train},
          {"repetitions", repetitions},
          {"methods", methods_json(methods)},
          {"seed", seed},
          {"ci_target_length", ci.target_length},
          {"ci_confidence", ci.confidence},
          {"ci_batch", ci.batch},
          {"ci_cap", ci.cap},
          {"val_fraction", val_fraction},
          {"grid_points", grid_points},
          {"retrain", retrain}};
}

nlohmann::json RealConfig::to_json() const {
  return {{"dataset", dataset},
          {"m", m},
          {"shuffles", shuffles},
          {"methods", methods_json(methods)},
          {"seed", seed},
          {"val_fraction", val_fraction},
          {"grid_points", grid_points},
          {"clone_positions", clone_positions}};
}

ExperimentReport run_synthetic_experiment(const SyntheticConfig& config) {
  if (config.repetitions == 0) throw std::invalid_argument("synthetic experiment: no repetitions");
  if (config.methods.empty()) throw std::invalid_argument("synthetic experiment: no methods");
  const auto scheme = default_region_scheme(config.process);
  const auto& methods = config.methods;
  const bool need_ensemble =
      std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::kCentralized; });

  struct Run {
    std::vector<double> accuracy;
    double lambda = 0.0;
    std::size_t cap_stops = 0;
  };
  std::vector<Run> runs(config.repetitions);

  parallel_for(config.repetitions, config.threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.seed, r);
    try {
      const auto train = generate(config.process, config.n_train, derive_seed(seed, 0));
      const auto test_seed = derive_seed(seed, 2);
      const TestBatch batches = [&](std::size_t b, std::size_t size) {
        return generate(config.process, size, derive_seed(test_seed, b));
      };

      std::optional<DelcoFit> fit;
      std::vector<Classifier> members;
      if (need_ensemble) {
        DelcoOptions opts;
        opts.n_val = static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(train.size())));
        opts.grid = default_grid(region_count(scheme), config.grid_points);
        opts.retrain = config.retrain;
        opts.seed = derive_seed(seed, 1);
        fit = fit_delco_detailed(train, partition_synthetic(train, scheme), opts);
        members.assign(fit->final_members.begin(), fit->final_members.end());
        runs[r].lambda = fit->ensemble.lambda_hat();
      }

      std::vector<PredictFn> predictors;
      std::vector<std::size_t> best_slot;  // Best: one predictor per member, max taken afterwards
      for (Method m : methods) {
        switch (m) {
          case Method::kSelection: {
            const auto acc = member_accuracies(fit->val_predictions, fit->split.val.labels());
            const auto pick = static_cast<std::size_t>(std::max_element(acc.begin(), acc.end()) - acc.begin());
            const Classifier chosen = members[pick];
            predictors.emplace_back([chosen](std::span<const double> x) { return chosen.predict(x); });
            break;
          }
          case Method::kBest:
            best_slot.push_back(predictors.size());
            for (const auto& c : members)
              predictors.emplace_back([c](std::span<const double> x) { return c.predict(x); });
            break;
          case Method::kWeightedVote: {
            auto w = member_accuracies(fit->val_predictions, fit->split.val.labels());
            auto vote = std::make_shared<WeightedVoteEnsemble>(members, std::move(w));
            predictors.emplace_back([vote](std::span<const double> x) { return vote->predict(x); });
            break;
          }
          case Method::kStacking: {
            const auto& val = fit->split.val;
            auto stage = train_logreg(stacking_features(fit->val_predictions, val.labels(), val.num_classes(),
                                                        StackingEncoding::kRawIndex));
            auto stack = std::make_shared<StackedEnsemble>(members, std::move(stage), StackingEncoding::kRawIndex);
            predictors.emplace_back([stack](std::span<const double> x) { return stack->predict(x); });
            break;
          }
          case Method::kIndependent: {
            auto ens = std::make_shared<CopulaEnsemble>(fit->ensemble.with_lambda(0.0));
            predictors.emplace_back([ens](std::span<const double> x) { return ens->predict(x); });
            break;
          }
          case Method::kDelco: {
            auto ens = std::make_shared<CopulaEnsemble>(fit->ensemble);
            predictors.emplace_back([ens](std::span<const double> x) { return ens->predict(x); });
            break;
          }
          case Method::kCentralized: {
            const Classifier central = centralized_train(train);
            predictors.emplace_back([central](std::span<const double> x) { return central.predict(x); });
            break;
          }
        }
      }

      const auto est = eval_many_until_ci(predictors, batches, config.ci);
      for (const auto& e : est) runs[r].cap_stops += e.stop == StopReason::kCap;

      std::size_t at = 0;
      std::size_t best_seen = 0;
      for (Method m : methods) {
        if (m == Method::kBest) {
          double top = 0.0;
          for (std::size_t k = 0; k < members.size(); ++k) top = std::max(top, est[best_slot[best_seen] + k].point);
          ++best_seen;
          at += members.size();
          runs[r].accuracy.push_back(top);
        } else {
          runs[r].accuracy.push_back(est[at++].point);
        }
      }
    } catch (const std::exception& e) {
      throw with_context("synthetic repetition " + std::to_string(r), seed, e);
    }
  });

  std::vector<std::vector<double>> acc;
  auto report = summarise("synthetic " + std::string(process_name(config.process)) +
                              ", n_train=" + std::to_string(config.n_train),
                          config.to_json(), methods, [&] {
                            for (const auto& run : runs) acc.push_back(run.accuracy);
                            return acc;
                          }());
  for (const auto& run : runs) {
    if (need_ensemble) report.lambda_hat.push_back(run.lambda);
    report.cap_stops += run.cap_stops;
  }
  return report;
}

namespace {

struct FoldResult {
  std::vector<double> accuracy;
  double lambda = 0.0;
  std::size_t traced = 0;
  std::size_t predicted = 0;
};

FoldResult run_fold(const LabeledDataset& train, const LabeledDataset& test, const RealConfig& config,
                    std::uint64_t seed) {
  FoldResult out;
  const int m = config.m;
  const auto plan = pca_class_split(train, m);
  const auto node_data = split_by_plan(train, plan);
  const auto nodes = split_nodes(node_data, config.val_fraction, seed);

  std::vector<LabeledDataset> vals;
  for (const auto& n : nodes) vals.push_back(n.val);
  const auto pooled_val = LabeledDataset::concat(vals);

  std::optional<CopulaEnsemble> ensemble;
  if (m >= 2) {
    ProtocolConfig pc;
    pc.val_fraction = config.val_fraction;
    pc.grid = default_grid(m, config.grid_points);
    pc.seed = seed;
    pc.clone_positions = config.clone_positions;
    auto result = run_protocol(std::span<const NodeData>(nodes), pc);
    out.traced = result.trace.total_bytes();
    out.predicted = predicted_load(m, train.dim(), train.num_classes(), result.grid.size());
    ensemble.emplace(std::move(result.ensemble));
  } else {
    std::vector<Classifier> members{Classifier(train_logreg(nodes.front().train))};
    ensemble.emplace(fit_aggregator(std::move(members), pooled_val, default_grid(1)));
  }
  out.lambda = ensemble->lambda_hat();
  const auto& members = ensemble->members();

  for (Method method : config.methods) {
    double acc = 0.0;
    switch (method) {
      case Method::kSelection:
        acc = accuracy(members[classifier_selection(members, pooled_val)].predict_all(test), test);
        break;
      case Method::kBest:
        acc = accuracy(members[best_classifier(members, test)].predict_all(test), test);
        break;
      case Method::kWeightedVote: {
        const auto vote = WeightedVoteEnsemble::fit(members, pooled_val);
        std::vector<int> pred(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) pred[i] = vote.predict(test.row(i));
        acc = accuracy(pred, test);
        break;
      }
      case Method::kStacking: {
        const auto stack = StackedEnsemble::fit(members, pooled_val);
        std::vector<int> pred(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) pred[i] = stack.predict(test.row(i));
        acc = accuracy(pred, test);
        break;
      }
      case Method::kIndependent:
        acc = accuracy(ensemble->with_lambda(0.0).predict_all(test), test);
        break;
      case Method::kDelco:
        acc = accuracy(ensemble->predict_all(test), test);
        break;
      case Method::kCentralized:
        acc = accuracy(centralized_train(train).predict_all(test), test);
        break;
    }
    out.accuracy.push_back(acc);
  }
  return out;
}

}  // namespace

ExperimentReport run_real_experiment(const LabeledDataset& data, const RealConfig& config) {
  if (config.shuffles == 0) throw std::invalid_argument("real experiment: no shuffles");
  if (config.m < 1) throw std::invalid_argument("real experiment: m must be positive");
  if (config.methods.empty()) throw std::invalid_argument("real experiment: no methods");
  if (data.size() < 4) throw std::invalid_argument("real experiment: dataset too small");

  std::vector<FoldResult> folds(2 * config.shuffles);
  parallel_for(config.shuffles, config.threads, [&](std::size_t s) {
    const std::uint64_t seed = derive_seed(config.seed, s);
    try {
      std::vector<std::size_t> order(data.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(derive_seed(seed, 0));
      std::shuffle(order.begin(), order.end(), rng);
      const auto half = static_cast<long>(data.size() / 2);
      std::vector<std::size_t> a(order.begin(), order.begin() + half);
      std::vector<std::size_t> b(order.begin() + half, order.end());
      const auto part_a = data.subset(a);
      const auto part_b = data.subset(b);
      folds[2 * s] = run_fold(part_a, part_b, config, derive_seed(seed, 1));
      folds[2 * s + 1] = run_fold(part_b, part_a, config, derive_seed(seed, 2));
    } catch (const std::exception& e) {
      throw with_context("shuffle " + std::to_string(s), seed, e);
    }
  });

  std::vector<std::vector<double>> acc;
  for (const auto& f : folds) acc.push_back(f.accuracy);
  auto report = summarise("real " + config.dataset + ", m=" + std::to_string(config.m) +
                              (config.clone_positions.empty() ? "" : ", cloned"),
                          config.to_json(), config.methods, acc);
  for (const auto& f : folds) {
    report.lambda_hat.push_back(f.lambda);
    if (config.m >= 2) {
      report.traced_bytes.push_back(f.traced);
      report.predicted_bytes.push_back(f.predicted);
    }
  }
  return report;
}

CloneReport run_clone_experiment(const LabeledDataset& data, const RealConfig& config) {
  if (config.m != 10) throw std::invalid_argument("clone experiment: m must be 10");
  RealConfig cloned = config;
  if (cloned.clone_positions.empty())
    cloned.clone_positions.assign(std::begin(kDefaultClonePositions), std::end(kDefaultClonePositions));
  RealConfig plain = config;
  plain.clone_positions.clear();
  return CloneReport{run_real_experiment(data, cloned), run_real_experiment(data, plain)};
}

}  // namespace delco
