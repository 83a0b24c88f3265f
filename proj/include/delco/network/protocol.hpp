#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "delco/aggregation/ensemble.hpp"
#include "delco/data/dataset.hpp"
#include "delco/learner/logreg.hpp"

namespace delco {

inline constexpr int kCoordinator = -1;

enum class MessageKind {
  kModelShare,
  kConfusionMatrix,
  kClassCounts,
  kGlobalEstimates,
  kGridAccuracies,
};

std::string_view message_kind_name(MessageKind kind);

struct ProtocolMessage {
  int sender;    // node index or kCoordinator
  int receiver;  // node index or kCoordinator
  MessageKind kind;
  std::size_t payload_bytes;

  friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

class NetworkTrace {
 public:
  void record(ProtocolMessage message);

  const std::vector<ProtocolMessage>& messages() const { return messages_; }
  std::size_t total_bytes() const { return total_bytes_; }
  std::size_t count(MessageKind kind) const;
  std::size_t bytes(MessageKind kind) const;

  friend bool operator==(const NetworkTrace&, const NetworkTrace&) = default;

 private:
  std::vector<ProtocolMessage> messages_;
  std::size_t total_bytes_ = 0;
};

/// One JSON object per message, then a summary record carrying total_bytes
/// and `predicted_bytes`.
void write_trace_jsonl(std::ostream& out, const NetworkTrace& trace, std::size_t predicted_bytes);

/// A node's private data after its local train/validation split.
struct NodeData {
  LabeledDataset train;
  LabeledDataset val;
};

/// Splits every node's data with `val_fraction` (at least one row each side).
/// Local validation sets need not contain every class.
std::vector<NodeData> split_nodes(std::span<const LabeledDataset> node_datasets,
                                  double val_fraction, std::uint64_t seed);

struct ProtocolConfig {
  double val_fraction = 0.1;
  std::vector<double> grid;  // empty: default_grid(m)
  TrainOptions train;
  std::uint64_t seed = 0;
  /// When non-empty (m = 10, six positions), every node replaces the shared
  /// members at these positions by one majority vote before estimation.
  std::vector<std::size_t> clone_positions;
};

struct ProtocolResult {
  CopulaEnsemble ensemble;
  NetworkTrace trace;
  OutputCounts pooled_counts;
  std::vector<double> grid;
  std::vector<std::uint64_t> grid_correct;
  std::vector<std::uint64_t> grid_total;
};

/// One-shot star protocol:
///  1. every node trains on its local split and sends its model to every
///     other node and to the coordinator;
///  2. every node sends the raw confusion counts of all m models on its local
///     validation set, plus its class counts;
///  3. the coordinator sums the counts and smooths them into the global
///     output model;
///  4. the coordinator broadcasts gamma and theta;
///  5. every node reports (correct, total) for each grid value;
///  6. the coordinator picks lambda from the pooled counts.
ProtocolResult run_protocol(std::span<const NodeData> nodes, const ProtocolConfig& config);
ProtocolResult run_protocol(std::span<const LabeledDataset> node_datasets, const ProtocolConfig& config);

struct LoadBreakdown {
  std::size_t peer_models;         // m(m-1) node-to-node model shares
  std::size_t coordinator_models;  // m node-to-coordinator model shares
  std::size_t confusion;           // m*m confusion matrices
  std::size_t class_counts;        // m class-count vectors
  std::size_t estimates;           // m broadcasts of gamma and theta
  std::size_t grid;                // m grid-accuracy reports
  std::size_t total() const {
    return peer_models + coordinator_models + confusion + class_counts + estimates + grid;
  }
};

/// Closed-form byte count of run_protocol, known before any training.
LoadBreakdown predicted_load_breakdown(int m, int d, int l, std::size_t grid_size);
std::size_t predicted_load(int m, int d, int l, std::size_t grid_size);

}  // namespace delco
