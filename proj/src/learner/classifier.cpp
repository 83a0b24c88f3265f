#include "delco/learner/classifier.hpp"

namespace delco {

PredictionMatrix predict_members(std::span<const Classifier> members, const LabeledDataset& data) {
  PredictionMatrix z(data.size(), static_cast<int>(members.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    for (std::size_t k = 0; k < members.size(); ++k) z.at(i, static_cast<int>(k)) = members[k].predict(x);
  }
  return z;
}

std::vector<int> member_outputs(std::span<const Classifier> members, std::span<const double> x) {
  std::vector<int> z(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) z[k] = members[k].predict(x);
  return z;
}

}  // namespace delco
