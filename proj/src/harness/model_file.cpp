#include "delco/harness/model_file.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>

namespace delco {
namespace {

constexpr std::uint64_t kMagic = 0x314C444D4F434C44ULL;  // "DLCOMDL1"

void encode_members(ByteWriter& out, const std::vector<Classifier>& members) {
  out.put_u64(members.size());
  for (const auto& c : members) {
    if (c.linear() == nullptr) throw std::invalid_argument("model file: members must be linear");
    encode(out, *c.linear());
  }
}

std::vector<Classifier> decode_members(ByteReader& in) {
  const auto m = in.get_u64();
  if (m == 0 || m > 100000) throw std::runtime_error("model file: bad member count");
  std::vector<Classifier> members;
  for (std::uint64_t k = 0; k < m; ++k) members.emplace_back(decode_linear(in));
  return members;
}

}  // namespace

int StoredModel::predict(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

std::vector<int> StoredModel::predict_all(const LabeledDataset& data) const {
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
  return out;
}

int StoredModel::num_classes() const {
  return std::visit([](const auto& m) { return m.num_classes(); }, model);
}

int StoredModel::input_dim() const {
  return std::visit([](const auto& m) { return m.input_dim(); }, model);
}

StoredModel fit_method(Method method, const LabeledDataset& train, const PartitionPlan& plan,
                       const DelcoOptions& options) {
  if (method == Method::kBest)
    throw std::invalid_argument("method 'best' picks members by test accuracy and cannot be trained alone");
  if (method == Method::kCentralized) return {method, centralized_train(train, options.train)};

  const auto fit = fit_delco_detailed(train, plan, options);
  const std::vector<Classifier> members(fit.final_members.begin(), fit.final_members.end());
  const auto& val = fit.split.val;
  switch (method) {
    case Method::kDelco:
      return {method, fit.ensemble};
    case Method::kIndependent:
      return {method, fit.ensemble.with_lambda(0.0)};
    case Method::kSelection: {
      const auto acc = member_accuracies(fit.val_predictions, val.labels());
      const auto pick = std::max_element(acc.begin(), acc.end()) - acc.begin();
      return {method, fit.final_members[static_cast<std::size_t>(pick)]};
    }
    case Method::kWeightedVote:
      return {method, WeightedVoteEnsemble(members, member_accuracies(fit.val_predictions, val.labels()))};
    case Method::kStacking: {
      auto stage = train_logreg(
          stacking_features(fit.val_predictions, val.labels(), val.num_classes(), StackingEncoding::kRawIndex),
          options.train);
      return {method, StackedEnsemble(members, std::move(stage), StackingEncoding::kRawIndex)};
    }
    default:
      break;
  }
  throw std::logic_error("fit_method: unhandled method");
}

Bytes encode_model(const StoredModel& stored) {
  ByteWriter out;
  out.put_u64(kMagic);
  out.put_u64(static_cast<std::uint64_t>(stored.method));
  out.put_u64(stored.model.index());
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearClassifier> || std::is_same_v<T, CopulaEnsemble>) {
          encode(out, m);
        } else if constexpr (std::is_same_v<T, WeightedVoteEnsemble>) {
          encode_members(out, m.members());
          for (double w : m.weights()) out.put_f64(w);
        } else {
          encode_members(out, m.members());
          out.put_u64(static_cast<std::uint64_t>(m.encoding()));
          encode(out, m.second_stage());
        }
      },
      stored.model);
  return std::move(out).bytes();
}

StoredModel decode_model(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (in.get_u64() != kMagic) throw std::runtime_error("model file: bad magic");
  const auto method_tag = in.get_u64();
  if (method_tag > static_cast<std::uint64_t>(Method::kCentralized))
    throw std::runtime_error("model file: unknown method tag");
  const auto method = static_cast<Method>(method_tag);
  StoredModel stored{method, LinearClassifier::zeros(2, 1)};
  switch (in.get_u64()) {
    case 0:
      stored.model = decode_linear(in);
      break;
    case 1:
      stored.model = decode_ensemble(in);
      break;
    case 2: {
      auto members = decode_members(in);
      std::vector<double> w(members.size());
      for (auto& v : w) v = in.get_f64();
      stored.model = WeightedVoteEnsemble(std::move(members), std::move(w));
      break;
    }
    case 3: {
      auto members = decode_members(in);
      const auto enc = in.get_u64();
      if (enc > 1) throw std::runtime_error("model file: unknown stacking encoding");
      auto stage = decode_linear(in);
      stored.model = StackedEnsemble(std::move(members), std::move(stage), static_cast<StackingEncoding>(enc));
      break;
    }
    default:
      throw std::runtime_error("model file: unknown payload tag");
  }
  if (!in.done()) throw std::runtime_error("model file: trailing bytes");
  return stored;
}

void save_model(const std::filesystem::path& path, const StoredModel& model) {
  const auto bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

}  // namespace delco
