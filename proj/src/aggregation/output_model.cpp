#include "delco/aggregation/output_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "delco/copula/copula.hpp"
#include "delco/copula/normal.hpp"

namespace delco {

OutputCounts::OutputCounts(int num_classifiers, int num_classes)
    : m_(num_classifiers),
      l_(num_classes),
      class_counts_(static_cast<std::size_t>(num_classes), 0),
      joint_(static_cast<std::size_t>(num_classifiers) * num_classes * num_classes, 0) {
  if (num_classifiers < 1 || num_classes < 2)
    throw std::invalid_argument("output counts: need m >= 1 and l >= 2");
}

void OutputCounts::add(std::span<const int> z, int y) {
  if (static_cast<int>(z.size()) != m_) throw std::invalid_argument("output counts: wrong z length");
  if (y < 0 || y >= l_) throw std::invalid_argument("output counts: label out of range");
  ++class_counts_[y];
  for (int k = 0; k < m_; ++k) {
    if (z[k] < 0 || z[k] >= l_)
      throw std::invalid_argument("output counts: prediction out of range");
    ++joint_[index(k, y, z[k])];
  }
}

OutputCounts& OutputCounts::operator+=(const OutputCounts& other) {
  if (other.m_ != m_ || other.l_ != l_)
    throw std::invalid_argument("output counts: shape mismatch");
  for (std::size_t i = 0; i < class_counts_.size(); ++i) class_counts_[i] += other.class_counts_[i];
  for (std::size_t i = 0; i < joint_.size(); ++i) joint_[i] += other.joint_[i];
  return *this;
}

std::uint64_t OutputCounts::total() const {
  std::uint64_t t = 0;
  for (auto c : class_counts_) t += c;
  return t;
}

OutputCounts count_outputs(const PredictionMatrix& z, std::span<const int> labels, int num_classes) {
  if (z.rows() != labels.size())
    throw std::invalid_argument("count_outputs: prediction rows do not match label count");
  OutputCounts counts(z.cols(), num_classes);
  for (std::size_t i = 0; i < z.rows(); ++i) counts.add(z.row(i), labels[i]);
  return counts;
}

OutputModel::OutputModel(int m, int l, std::vector<double> gamma, std::vector<double> theta)
    : m_(m), l_(l), gamma_(std::move(gamma)), theta_(std::move(theta)) {
  cumulative_.resize(theta_.size());
  log_theta_.resize(theta_.size());
  score_.resize(theta_.size());
  log_gamma_.resize(gamma_.size());
  for (int y = 0; y < l_; ++y) log_gamma_[y] = std::log(gamma_[y]);
  for (int k = 0; k < m_; ++k) {
    for (int y = 0; y < l_; ++y) {
      double running = 0.0;
      for (int j = 0; j < l_; ++j) {
        const auto at = index(k, y, j);
        running = (j == 0 ? 0.0 : running) + theta_[at];
        cumulative_[at] = running;
        log_theta_[at] = std::log(theta_[at]);
        score_[at] = std_normal_quantile(clamp_probability(running));
      }
    }
  }
}

OutputModel::OutputModel(const OutputCounts& counts)
    : OutputModel([&] {
        const int m = counts.num_classifiers();
        const int l = counts.num_classes();
        const double n_val = static_cast<double>(counts.total());
        std::vector<double> gamma(static_cast<std::size_t>(l));
        std::vector<double> theta(static_cast<std::size_t>(m) * l * l);
        for (int y = 0; y < l; ++y) {
          const double n_y = static_cast<double>(counts.class_count(y));
          gamma[y] = (1.0 + n_y) / (static_cast<double>(l) + n_val);
          for (int k = 0; k < m; ++k)
            for (int j = 0; j < l; ++j)
              theta[(static_cast<std::size_t>(k) * l + y) * l + j] =
                  (1.0 + static_cast<double>(counts.confusion(k, y, j))) /
                  (static_cast<double>(l) + n_y);
        }
        return OutputModel(m, l, std::move(gamma), std::move(theta));
      }()) {}

OutputModel OutputModel::from_parameters(std::vector<double> gamma, std::vector<double> theta,
                                         int num_classifiers) {
  const int l = static_cast<int>(gamma.size());
  const int m = num_classifiers;
  if (l < 2 || m < 1) throw std::invalid_argument("output model: need l >= 2 and m >= 1");
  if (theta.size() != static_cast<std::size_t>(m) * l * l)
    throw std::invalid_argument("output model: theta must hold m*l*l entries");
  auto check_simplex = [](const double* p, int len, const std::string& what) {
    double s = 0.0;
    for (int i = 0; i < len; ++i) {
      if (!(p[i] > 0.0) || !std::isfinite(p[i]))
        throw std::invalid_argument("output model: " + what + " has a non-positive entry");
      s += p[i];
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("output model: " + what + " does not sum to one");
  };
  check_simplex(gamma.data(), l, "gamma");
  for (int k = 0; k < m; ++k)
    for (int y = 0; y < l; ++y)
      check_simplex(theta.data() + (static_cast<std::size_t>(k) * l + y) * l, l,
                    "theta[" + std::to_string(k) + "][" + std::to_string(y) + "]");
  return OutputModel(m, l, std::move(gamma), std::move(theta));
}

OutputModel fit_output_model(const PredictionMatrix& z, std::span<const int> labels, int num_classes) {
  return OutputModel(count_outputs(z, labels, num_classes));
}

void encode(ByteWriter& out, const OutputModel& model) {
  for (double g : model.gamma_vector()) out.put_f64(g);
  for (double t : model.theta_tensor()) out.put_f64(t);
}

OutputModel decode_output_model(ByteReader& in, int num_classifiers, int num_classes) {
  std::vector<double> gamma(static_cast<std::size_t>(num_classes));
  for (auto& g : gamma) g = in.get_f64();
  std::vector<double> theta(static_cast<std::size_t>(num_classifiers) * num_classes * num_classes);
  for (auto& t : theta) t = in.get_f64();
  return OutputModel::from_parameters(std::move(gamma), std::move(theta), num_classifiers);
}

}  // namespace delco
