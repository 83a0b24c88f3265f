#include "delco/data/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace delco {

RegionScheme parse_region_scheme(std::string_view name) {
  if (name == "moons-3") return RegionScheme::kMoons3;
  if (name == "blobs-2") return RegionScheme::kBlobs2;
  if (name == "circles-3") return RegionScheme::kCircles3;
  throw std::invalid_argument("unknown region scheme '" + std::string(name) + "'");
}

std::string_view region_scheme_name(RegionScheme scheme) {
  switch (scheme) {
    case RegionScheme::kMoons3: return "moons-3";
    case RegionScheme::kBlobs2: return "blobs-2";
    case RegionScheme::kCircles3: return "circles-3";
  }
  return "?";
}

RegionScheme default_region_scheme(SyntheticProcess process) {
  switch (process) {
    case SyntheticProcess::kMoons: return RegionScheme::kMoons3;
    case SyntheticProcess::kBlobs: return RegionScheme::kBlobs2;
    case SyntheticProcess::kCircles: return RegionScheme::kCircles3;
  }
  throw std::invalid_argument("default_region_scheme: bad process");
}

int region_count(RegionScheme scheme) { return scheme == RegionScheme::kBlobs2 ? 2 : 3; }

int region_of(RegionScheme scheme, std::span<const double> x) {
  if (x.size() != 2) throw std::invalid_argument("region_of: expected a 2-D point");
  switch (scheme) {
    case RegionScheme::kMoons3:
      return x[0] < 0.0 ? 0 : (x[0] < 1.0 ? 1 : 2);
    case RegionScheme::kBlobs2:
      return x[0] < 0.0 ? 0 : 1;
    case RegionScheme::kCircles3: {
      constexpr double two_pi = 2.0 * std::numbers::pi;
      double angle = std::atan2(x[1], x[0]);
      if (angle < 0.0) angle += two_pi;
      const int sector = static_cast<int>(angle / (two_pi / 3.0));
      return std::min(sector, 2);
    }
  }
  throw std::invalid_argument("region_of: bad scheme");
}

PartitionPlan partition_synthetic(const LabeledDataset& data, RegionScheme scheme) {
  if (data.dim() != 2)
    throw std::invalid_argument("partition_synthetic: region schemes need 2-D data");
  std::vector<int> nodes(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) nodes[i] = region_of(scheme, data.row(i));
  return PartitionPlan(std::move(nodes), region_count(scheme));
}

Eigen::VectorXd top_eigenvector(const Eigen::MatrixXd& symmetric,
                                const PowerIterationOptions& options) {
  const Eigen::Index d = symmetric.rows();
  if (d == 0 || symmetric.cols() != d)
    throw std::invalid_argument("top_eigenvector: expected a non-empty square matrix");

  auto normalise_sign = [](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0.0) v = -v;
        return;
      }
    }
  };

  // Start from the column with the largest diagonal entry: it has a nonzero
  // component along the dominant direction unless the matrix is degenerate.
  Eigen::Index start = 0;
  symmetric.diagonal().maxCoeff(&start);
  Eigen::VectorXd v = symmetric.col(start);
  if (v.norm() == 0.0) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[0] = 1.0;
    return e;
  }
  v.normalize();
  normalise_sign(v);

  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::VectorXd next = symmetric * v;
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    normalise_sign(next);
    const double change = (next - v).norm();
    v = std::move(next);
    if (change < options.tolerance) break;
  }
  return v;
}

PartitionPlan pca_class_split(const LabeledDataset& data, int m) {
  if (m < 1) throw std::invalid_argument("pca_class_split: m must be positive");
  std::vector<int> nodes(data.size(), 0);
  const auto counts = data.class_counts();

  for (int y = 0; y < data.num_classes(); ++y) {
    if (counts[y] < static_cast<std::size_t>(m))
      throw std::invalid_argument("pca_class_split: class " + std::to_string(y) + " has " +
                                  std::to_string(counts[y]) + " examples, fewer than m = " +
                                  std::to_string(m));
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data.label(i) == y) rows.push_back(i);

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(n, data.dim());
    for (Eigen::Index r = 0; r < n; ++r)
      x.row(r) = data.features().row(static_cast<Eigen::Index>(rows[r]));
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
    const Eigen::VectorXd direction = top_eigenvector(cov);
    const Eigen::VectorXd projected = x * direction;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // rows are ascending, so a stable sort breaks ties by original row index
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return projected[a] < projected[b]; });

    const std::size_t base = rows.size() / static_cast<std::size_t>(m);
    const std::size_t extra = rows.size() % static_cast<std::size_t>(m);
    std::size_t at = 0;
    for (int chunk = 0; chunk < m; ++chunk) {
      const std::size_t len = base + (static_cast<std::size_t>(chunk) < extra ? 1 : 0);
      for (std::size_t j = 0; j < len; ++j) nodes[rows[static_cast<std::size_t>(order[at++])]] = chunk;
    }
  }
  return PartitionPlan(std::move(nodes), m);
}

}  // namespace delco
