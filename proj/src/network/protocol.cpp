#include "delco/network/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "delco/baselines/baselines.hpp"
#include "delco/data/random.hpp"

namespace delco {
namespace {

// Payload encodings. Every field is 8 bytes wide.

Bytes encode_confusion(const OutputCounts& counts, int k) {
  ByteWriter w;
  w.put_u64(static_cast<std::uint64_t>(k));
  for (int y = 0; y < counts.num_classes(); ++y)
    for (int j = 0; j < counts.num_classes(); ++j) w.put_u64(counts.confusion(k, y, j));
  return std::move(w).bytes();
}

int decode_confusion(std::span<const std::uint8_t> bytes, OutputCounts& into) {
  ByteReader r(bytes);
  const int k = static_cast<int>(r.get_u64());
  for (int y = 0; y < into.num_classes(); ++y)
    for (int j = 0; j < into.num_classes(); ++j) into.confusion(k, y, j) += r.get_u64();
  return k;
}

Bytes encode_class_counts(const OutputCounts& counts) {
  ByteWriter w;
  for (int y = 0; y < counts.num_classes(); ++y) w.put_u64(counts.class_count(y));
  return std::move(w).bytes();
}

void decode_class_counts(std::span<const std::uint8_t> bytes, OutputCounts& into) {
  ByteReader r(bytes);
  for (int y = 0; y < into.num_classes(); ++y) into.class_count(y) += r.get_u64();
}

Bytes encode_grid(std::span<const std::uint64_t> correct, std::uint64_t total) {
  ByteWriter w;
  w.put_u64(correct.size());
  for (auto c : correct) {
    w.put_u64(c);
    w.put_u64(total);
  }
  return std::move(w).bytes();
}

class Network {
 public:
  const Bytes& send(int from, int to, MessageKind kind, Bytes payload) {
    trace_.record({from, to, kind, payload.size()});
    last_ = std::move(payload);
    return last_;
  }
  NetworkTrace take_trace() { return std::move(trace_); }

 private:
  NetworkTrace trace_;
  Bytes last_;
};

}  // namespace

std::string_view message_kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::kModelShare: return "model-share";
    case MessageKind::kConfusionMatrix: return "confusion-matrix";
    case MessageKind::kClassCounts: return "class-counts";
    case MessageKind::kGlobalEstimates: return "global-estimates";
    case MessageKind::kGridAccuracies: return "grid-accuracies";
  }
  return "?";
}

void NetworkTrace::record(ProtocolMessage message) {
  total_bytes_ += message.payload_bytes;
  messages_.push_back(message);
}

std::size_t NetworkTrace::count(MessageKind kind) const {
  std::size_t n = 0;
  for (const auto& m : messages_) n += m.kind == kind;
  return n;
}

std::size_t NetworkTrace::bytes(MessageKind kind) const {
  std::size_t n = 0;
  for (const auto& m : messages_)
    if (m.kind == kind) n += m.payload_bytes;
  return n;
}

void write_trace_jsonl(std::ostream& out, const NetworkTrace& trace, std::size_t predicted_bytes) {
  auto endpoint = [](int id) -> nlohmann::json {
    if (id == kCoordinator) return "coordinator";
    return id;
  };
  for (const auto& m : trace.messages()) {
    nlohmann::json line = {{"sender", endpoint(m.sender)},
                           {"receiver", endpoint(m.receiver)},
                           {"kind", message_kind_name(m.kind)},
                           {"payload_bytes", m.payload_bytes}};
    out << line.dump() << '\n';
  }
  nlohmann::json summary = {{"summary", true},
                            {"messages", trace.messages().size()},
                            {"total_bytes", trace.total_bytes()},
                            {"predicted_bytes", predicted_bytes}};
  out << summary.dump() << '\n';
}

std::vector<NodeData> split_nodes(std::span<const LabeledDataset> node_datasets, double val_fraction,
                                  std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("split_nodes: validation fraction must lie in (0, 1)");
  std::vector<NodeData> nodes;
  for (std::size_t k = 0; k < node_datasets.size(); ++k) {
    const auto& data = node_datasets[k];
    if (data.size() < 2)
      throw std::invalid_argument("split_nodes: node " + std::to_string(k) +
                                  " needs at least two examples");
    auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(data.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, data.size() - 1);
    auto split = split_validation(data, n_val, derive_seed(seed, k), ClassCoverage::kAny);
    nodes.push_back(NodeData{std::move(split.train), std::move(split.val)});
  }
  return nodes;
}

ProtocolResult run_protocol(std::span<const NodeData> nodes, const ProtocolConfig& config) {
  const int m = static_cast<int>(nodes.size());
  if (m < 2) throw std::invalid_argument("run_protocol: need at least two nodes");
  const int l = nodes.front().train.num_classes();
  const int d = nodes.front().train.dim();
  for (int k = 0; k < m; ++k) {
    const auto& node = nodes[static_cast<std::size_t>(k)];
    if (node.train.num_classes() != l || node.train.dim() != d || node.val.num_classes() != l ||
        node.val.dim() != d)
      throw std::invalid_argument("run_protocol: nodes disagree on data shape");
    if (node.train.empty())
      throw std::invalid_argument("run_protocol: node " + std::to_string(k) + " has no training data");
  }
  const auto grid = config.grid.empty() ? default_grid(m) : config.grid;
  Network net;

  // Phase 1: local training and one-shot model sharing.
  std::vector<LinearClassifier> local;
  local.reserve(static_cast<std::size_t>(m));
  for (const auto& node : nodes) local.push_back(train_logreg(node.train, config.train));

  std::vector<std::vector<Classifier>> view(static_cast<std::size_t>(m));
  std::vector<Classifier> coordinator_view;
  std::vector<std::vector<std::optional<LinearClassifier>>> received(
      static_cast<std::size_t>(m), std::vector<std::optional<LinearClassifier>>(static_cast<std::size_t>(m)));
  for (int i = 0; i < m; ++i) {
    ByteWriter w;
    encode(w, local[i]);
    const Bytes blob = std::move(w).bytes();
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      ByteReader r(net.send(i, j, MessageKind::kModelShare, blob));
      received[j][i] = decode_linear(r);
    }
    ByteReader r(net.send(i, kCoordinator, MessageKind::kModelShare, blob));
    coordinator_view.emplace_back(decode_linear(r));
  }
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i)
      view[j].emplace_back(i == j ? local[i] : *received[j][i]);
    if (!config.clone_positions.empty())
      view[j] = majority_vote_clone_setup(view[j], config.clone_positions);
  }
  if (!config.clone_positions.empty())
    coordinator_view = majority_vote_clone_setup(coordinator_view, config.clone_positions);

  // Phase 2: local confusion counts and class counts.
  OutputCounts pooled(m, l);
  std::vector<PredictionMatrix> local_z;
  for (int i = 0; i < m; ++i) {
    const auto& val = nodes[static_cast<std::size_t>(i)].val;
    if (val.empty())
      throw std::runtime_error("run_protocol: node " + std::to_string(i) +
                               " has an empty validation set");
    auto z = predict_members(view[i], val);
    const auto counts = count_outputs(z, val.labels(), l);
    for (int k = 0; k < m; ++k)
      decode_confusion(net.send(i, kCoordinator, MessageKind::kConfusionMatrix, encode_confusion(counts, k)),
                       pooled);
    decode_class_counts(net.send(i, kCoordinator, MessageKind::kClassCounts, encode_class_counts(counts)),
                        pooled);
    local_z.push_back(std::move(z));
  }

  // Phase 3 + 4: smoothing at the coordinator, broadcast of the estimates.
  const OutputModel global(pooled);
  ByteWriter est;
  encode(est, global);
  const Bytes estimates = std::move(est).bytes();
  std::vector<OutputModel> node_model;
  for (int i = 0; i < m; ++i) {
    ByteReader r(net.send(kCoordinator, i, MessageKind::kGlobalEstimates, estimates));
    node_model.push_back(decode_output_model(r, m, l));
  }

  // Phase 5 + 6: local grid accuracies, pooled at the coordinator.
  std::vector<std::uint64_t> correct(grid.size(), 0);
  std::vector<std::uint64_t> total(grid.size(), 0);
  for (int i = 0; i < m; ++i) {
    const auto& val = nodes[static_cast<std::size_t>(i)].val;
    const auto local_correct = grid_correct_counts(node_model[i], local_z[i], val.labels(), grid);
    ByteReader r(net.send(i, kCoordinator, MessageKind::kGridAccuracies, encode_grid(local_correct, val.size())));
    const auto size = r.get_u64();
    for (std::uint64_t g = 0; g < size; ++g) {
      correct[g] += r.get_u64();
      total[g] += r.get_u64();
    }
  }
  const double lambda = select_lambda(grid, correct);

  return ProtocolResult{CopulaEnsemble(std::move(coordinator_view), global, lambda),
                        net.take_trace(),
                        std::move(pooled),
                        grid,
                        std::move(correct),
                        std::move(total)};
}

ProtocolResult run_protocol(std::span<const LabeledDataset> node_datasets, const ProtocolConfig& config) {
  const auto nodes = split_nodes(node_datasets, config.val_fraction, config.seed);
  return run_protocol(std::span<const NodeData>(nodes), config);
}

LoadBreakdown predicted_load_breakdown(int m, int d, int l, std::size_t grid_size) {
  if (m < 1 || d < 1 || l < 1) throw std::invalid_argument("predicted_load: counts must be positive");
  const std::size_t mm = static_cast<std::size_t>(m);
  const std::size_t ll = static_cast<std::size_t>(l);
  const std::size_t model = encoded_size(l, d);
  return LoadBreakdown{
      mm * (mm - 1) * model,
      mm * model,
      mm * mm * (8 + 8 * ll * ll),
      mm * 8 * ll,
      mm * 8 * (ll + mm * ll * ll),
      mm * (8 + 16 * grid_size),
  };
}

std::size_t predicted_load(int m, int d, int l, std::size_t grid_size) {
  return predicted_load_breakdown(m, d, l, grid_size).total();
}

}  // namespace delco
