// Command-line front end: data generation, training, evaluation, protocol
// simulation and the benchmark loops.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "delco/data/csv.hpp"
#include "delco/data/partition.hpp"
#include "delco/data/synthetic.hpp"
#include "delco/harness/experiment.hpp"
#include "delco/harness/model_file.hpp"
#include "delco/network/protocol.hpp"

namespace {

using namespace delco;

struct CsvArgs {
  std::string path;
  std::string label;
  std::string binarize;
  bool standardize = false;
  std::optional<bool> header;

  void attach(CLI::App& cmd) {
    cmd.add_option("--data", path, "input CSV")->required()->check(CLI::ExistingFile);
    cmd.add_option("--label", label, "label column name or 0-based index (default: last)");
    cmd.add_option("--binarize", binarize, "threshold:<col>:<value> or group:<a>,<b>,...");
    cmd.add_flag("--standardize", standardize, "z-score every feature column");
    cmd.add_option("--header", header, "force header detection on (1) or off (0)");
  }

  LabeledDataset load() const {
    CsvOptions opts;
    opts.label_column = label;
    opts.has_header = header;
    opts.standardize = standardize;
    if (!binarize.empty()) opts.binarize = BinarizeRule::parse(binarize);
    return load_csv(path, opts);
  }
};

struct NodeArgs {
  std::string regions;
  int nodes = 0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--regions", regions, "synthetic region scheme: moons-3, blobs-2, circles-3");
    cmd.add_option("--nodes", nodes, "number of nodes for the per-class principal-direction split");
  }

  PartitionPlan plan(const LabeledDataset& data) const {
    if (!regions.empty()) return partition_synthetic(data, parse_region_scheme(regions));
    if (nodes < 1) throw CLI::ValidationError("--regions or --nodes is required");
    return pca_class_split(data, nodes);
  }
};

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  if (names.empty()) return all_methods();
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

void emit(const ExperimentReport& report, const std::string& csv_path) {
  write_report_table(std::cout, report);
  std::cout << "config " << report.config.dump() << "\n\n";
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    write_report_csv(out, report);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-copula aggregation of decentralized classifier ensembles"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic data set as CSV");
  std::string gen_process = "moons";
  std::size_t gen_n = 400;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--process", gen_process, "moons, blobs or circles");
  gen->add_option("-n,--n", gen_n, "number of points");
  gen->add_option("--seed", gen_seed);
  gen->add_option("-o,--out", gen_out, "output file (default: stdout)");

  // train
  auto* train = app.add_subcommand("train", "fit one method and write a model file");
  CsvArgs train_csv;
  NodeArgs train_nodes;
  std::string train_method = "delco";
  std::string train_out;
  double train_val = 0.1;
  int train_grid = 101;
  bool train_no_retrain = false;
  std::uint64_t train_seed = 0;
  train_csv.attach(*train);
  train_nodes.attach(*train);
  train->add_option("--method", train_method,
                    "selection, weighted-vote, stacking, indep-copula, delco or centralized");
  train->add_option("-o,--out", train_out, "model file")->required();
  train->add_option("--val-fraction", train_val);
  train->add_option("--grid-points", train_grid);
  train->add_flag("--no-retrain", train_no_retrain, "keep the first-pass members");
  train->add_option("--seed", train_seed);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "accuracy of a model file on a CSV");
  CsvArgs eval_csv;
  std::string eval_model;
  eval_csv.attach(*evaluate);
  evaluate->add_option("--model", eval_model)->required()->check(CLI::ExistingFile);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the one-shot network protocol and dump its trace");
  CsvArgs sim_csv;
  NodeArgs sim_nodes;
  double sim_val = 0.1;
  int sim_grid = 101;
  std::uint64_t sim_seed = 0;
  std::string sim_trace;
  sim_csv.attach(*simulate);
  sim_nodes.attach(*simulate);
  simulate->add_option("--val-fraction", sim_val);
  simulate->add_option("--grid-points", sim_grid);
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--trace", sim_trace, "JSON-lines trace file (default: stdout)");

  // reproduce
  auto* reproduce = app.add_subcommand("reproduce", "benchmark loops");
  reproduce->require_subcommand(1);
  std::string rep_csv;
  std::vector<std::string> rep_methods;
  std::uint64_t rep_seed = 0;
  unsigned rep_threads = 1;
  int rep_grid = 101;
  double rep_val = 0.1;
  reproduce->add_option("--csv", rep_csv, "append method,mean,std,reps rows to this file");
  reproduce->add_option("--methods", rep_methods, "subset of methods (default: all)")->delimiter(',');
  reproduce->add_option("--seed", rep_seed);
  reproduce->add_option("--threads", rep_threads);
  reproduce->add_option("--grid-points", rep_grid);
  reproduce->add_option("--val-fraction", rep_val);

  auto* table1 = reproduce->add_subcommand("table1", "synthetic benchmarks");
  std::vector<std::string> t1_processes{"moons", "blobs", "circles"};
  std::size_t t1_n = 400;
  std::size_t t1_reps = 50;
  CiOptions t1_ci;
  bool t1_no_retrain = false;
  table1->add_option("--processes", t1_processes)->delimiter(',');
  table1->add_option("--n-train", t1_n);
  table1->add_option("--reps", t1_reps);
  table1->add_option("--ci-length", t1_ci.target_length, "stop once the interval is shorter than this");
  table1->add_option("--ci-batch", t1_ci.batch);
  table1->add_option("--ci-cap", t1_ci.cap);
  table1->add_flag("--no-retrain", t1_no_retrain);

  CsvArgs real_csv;
  std::string real_name;
  int real_m = 10;
  std::size_t real_shuffles = 5;
  auto* table3 = reproduce->add_subcommand("table3", "real data set, per-class principal-direction split");
  auto* table4 = reproduce->add_subcommand("table4", "as table3, with six members replaced by one majority vote");
  for (auto* cmd : {table3, table4}) {
    real_csv.attach(*cmd);
    cmd->add_option("--name", real_name, "label for the report");
    cmd->add_option("--shuffles", real_shuffles);
  }
  table3->add_option("--m", real_m, "number of nodes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto data = generate(parse_process(gen_process), gen_n, gen_seed);
      if (gen_out.empty()) write_csv(std::cout, data);
      else save_csv(gen_out, data);
    } else if (train->parsed()) {
      const auto data = train_csv.load();
      DelcoOptions opts;
      opts.n_val = static_cast<std::size_t>(std::llround(train_val * static_cast<double>(data.size())));
      opts.retrain = !train_no_retrain;
      opts.seed = train_seed;
      const auto plan = train_nodes.plan(data);
      opts.grid = default_grid(plan.num_nodes(), train_grid);
      const auto model = fit_method(parse_method(train_method), data, plan, opts);
      save_model(train_out, model);
      std::cout << "wrote " << method_name(model.method) << " model to " << train_out << '\n';
      if (const auto* ens = std::get_if<CopulaEnsemble>(&model.model))
        std::cout << "lambda_hat " << ens->lambda_hat() << '\n';
    } else if (evaluate->parsed()) {
      const auto model = load_model(eval_model);
      const auto data = eval_csv.load();
      const double acc = accuracy(model.predict_all(data), data);
      std::cout << method_name(model.method) << " accuracy " << acc << " on " << data.size() << " rows\n";
    } else if (simulate->parsed()) {
      const auto data = sim_csv.load();
      const auto parts = split_by_plan(data, sim_nodes.plan(data));
      ProtocolConfig pc;
      pc.val_fraction = sim_val;
      pc.grid = default_grid(static_cast<int>(parts.size()), sim_grid);
      pc.seed = sim_seed;
      const auto result = run_protocol(std::span<const LabeledDataset>(parts), pc);
      const auto predicted =
          predicted_load(static_cast<int>(parts.size()), data.dim(), data.num_classes(), result.grid.size());
      if (sim_trace.empty()) {
        write_trace_jsonl(std::cout, result.trace, predicted);
      } else {
        std::ofstream out(sim_trace);
        if (!out) throw std::runtime_error("cannot write " + sim_trace);
        write_trace_jsonl(out, result.trace, predicted);
      }
      std::cerr << "lambda_hat " << result.ensemble.lambda_hat() << ", " << result.trace.messages().size()
                << " messages, " << result.trace.total_bytes() << " bytes (predicted " << predicted << ")\n";
    } else if (table1->parsed()) {
      for (const auto& p : t1_processes) {
        SyntheticConfig cfg;
        cfg.process = parse_process(p);
        cfg.n_train = t1_n;
        cfg.repetitions = t1_reps;
        cfg.methods = parse_methods(rep_methods);
        cfg.seed = rep_seed;
        cfg.ci = t1_ci;
        cfg.val_fraction = rep_val;
        cfg.grid_points = rep_grid;
        cfg.retrain = !t1_no_retrain;
        cfg.threads = rep_threads;
        emit(run_synthetic_experiment(cfg), rep_csv);
      }
    } else if (table3->parsed() || table4->parsed()) {
      RealConfig cfg;
      cfg.dataset = real_name.empty() ? real_csv.path : real_name;
      cfg.m = table4->parsed() ? 10 : real_m;
      cfg.shuffles = real_shuffles;
      cfg.methods = parse_methods(rep_methods);
      cfg.seed = rep_seed;
      cfg.val_fraction = rep_val;
      cfg.grid_points = rep_grid;
      cfg.threads = rep_threads;
      const auto data = real_csv.load();
      if (table3->parsed()) {
        emit(run_real_experiment(data, cfg), rep_csv);
      } else {
        const auto report = run_clone_experiment(data, cfg);
        emit(report.cloned, rep_csv);
        emit(report.plain, rep_csv);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
