#include "delco/data/synthetic.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

#include "delco/data/random.hpp"

namespace delco {
namespace {

void require_multiple(std::size_t n, std::size_t k, const char* what) {
  if (n < k || n % k != 0)
    throw std::invalid_argument(std::string(what) + ": n must be a positive multiple of " +
                                std::to_string(k) + ", got " + std::to_string(n));
}

}  // namespace

SyntheticProcess parse_process(std::string_view name) {
  if (name == "moons") return SyntheticProcess::kMoons;
  if (name == "blobs") return SyntheticProcess::kBlobs;
  if (name == "circles") return SyntheticProcess::kCircles;
  throw std::invalid_argument("unknown synthetic process '" + std::string(name) + "'");
}

std::string_view process_name(SyntheticProcess process) {
  switch (process) {
    case SyntheticProcess::kMoons: return "moons";
    case SyntheticProcess::kBlobs: return "blobs";
    case SyntheticProcess::kCircles: return "circles";
  }
  return "?";
}

LabeledDataset gen_moons(std::size_t n, std::uint64_t seed, double noise) {
  require_multiple(n, 2, "gen_moons");
  constexpr double pi = std::numbers::pi;
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(0.0, pi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t half = n / 2;
  FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i >= half;
    const double t = angle(rng) + (second ? pi : 0.0);
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = (second ? 1.0 : 0.0) + std::cos(t);
    x(r, 1) = std::sin(t);
    y[i] = second ? 1 : 0;
  }
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    x(r, 0) += noise * gauss(rng);
    x(r, 1) += noise * gauss(rng);
  }
  return LabeledDataset(std::move(x), std::move(y), 2);
}

LabeledDataset gen_blobs(std::size_t n, std::uint64_t seed, double noise) {
  require_multiple(n, 4, "gen_blobs");
  struct Corner {
    double x1, x2;
    int label;
  };
  static constexpr Corner kCorners[4] = {{-2.0, -2.0, 0}, {2.0, 2.0, 0}, {-2.0, 2.0, 1}, {2.0, -2.0, 2}};

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t quarter = n / 4;
  FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Corner& c = kCorners[i / quarter];
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = c.x1 + noise * gauss(rng);
    x(r, 1) = c.x2 + noise * gauss(rng);
    y[i] = c.label;
  }
  return LabeledDataset(std::move(x), std::move(y), 3);
}

LabeledDataset gen_circles(std::size_t n, std::uint64_t seed, double noise) {
  require_multiple(n, 2, "gen_circles");
  const std::size_t half = n / 2;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(half);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool inner = i >= half;
    const double radius = inner ? 0.5 : 1.0;
    const double t = step * static_cast<double>(inner ? i - half : i);
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = radius * std::cos(t) + noise * gauss(rng);
    x(r, 1) = radius * std::sin(t) + noise * gauss(rng);
    y[i] = inner ? 1 : 0;
  }
  return LabeledDataset(std::move(x), std::move(y), 2);
}

LabeledDataset generate(SyntheticProcess process, std::size_t n, std::uint64_t seed) {
  switch (process) {
    case SyntheticProcess::kMoons: return gen_moons(n, seed);
    case SyntheticProcess::kBlobs: return gen_blobs(n, seed);
    case SyntheticProcess::kCircles: return gen_circles(n, seed);
  }
  throw std::invalid_argument("generate: bad process");
}

}  // namespace delco
