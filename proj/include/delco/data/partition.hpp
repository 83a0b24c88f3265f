#pragma once

#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "delco/data/dataset.hpp"
#include "delco/data/synthetic.hpp"

namespace delco {

/// Fixed feature-space regions used to distribute synthetic data non-iid.
///  - moons-3:   vertical strips cut at x1 = 0 and x1 = 1
///  - blobs-2:   half planes split at x1 = 0
///  - circles-3: 120 degree angular sectors starting at angle 0
enum class RegionScheme { kMoons3, kBlobs2, kCircles3 };

RegionScheme parse_region_scheme(std::string_view name);
std::string_view region_scheme_name(RegionScheme scheme);
RegionScheme default_region_scheme(SyntheticProcess process);
int region_count(RegionScheme scheme);

/// Region (node) index of a single 2-D point.
int region_of(RegionScheme scheme, std::span<const double> x);

/// Throws if the data is not 2-D or a region ends up empty.
PartitionPlan partition_synthetic(const LabeledDataset& data, RegionScheme scheme);

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

/// Unit eigenvector of the largest eigenvalue of a symmetric PSD matrix,
/// sign-normalised so that its first nonzero coordinate is positive.
Eigen::VectorXd top_eigenvector(const Eigen::MatrixXd& symmetric,
                                const PowerIterationOptions& options = {});

/// Per class: centre, project on the top principal direction, sort (ties by
/// row index) and cut into m contiguous chunks whose sizes differ by at most
/// one; chunk j goes to node j. Throws if a class has fewer than m examples.
PartitionPlan pca_class_split(const LabeledDataset& data, int m);

}  // namespace delco
