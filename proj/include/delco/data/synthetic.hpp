#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "delco/data/dataset.hpp"

namespace delco {

enum class SyntheticProcess { kMoons, kBlobs, kCircles };

SyntheticProcess parse_process(std::string_view name);
std::string_view process_name(SyntheticProcess process);

// Per-coordinate standard deviation of the additive Gaussian noise.
inline constexpr double kMoonsNoise = 0.3;
inline constexpr double kBlobsNoise = 1.0;
inline constexpr double kCirclesNoise = 0.15;

/// Two interleaved half circles of radius 1: class 0 centred at the origin
/// (angles uniform in [0, pi]), class 1 centred at (1, 0) (angles uniform in
/// [pi, 2pi]). `n` must be even; rows are class-0 block then class-1 block.
LabeledDataset gen_moons(std::size_t n, std::uint64_t seed, double noise = kMoonsNoise);

/// Four unit-covariance Gaussians on the corners of a square of edge 4.
/// (-2,-2) and (2,2) are class 0, (-2,2) class 1, (2,-2) class 2.
LabeledDataset gen_blobs(std::size_t n, std::uint64_t seed, double noise = kBlobsNoise);

/// Outer circle (radius 1, class 0) and inner circle (radius 0.5, class 1),
/// each sampled with a fixed angle step starting at angle 0.
LabeledDataset gen_circles(std::size_t n, std::uint64_t seed, double noise = kCirclesNoise);

LabeledDataset generate(SyntheticProcess process, std::size_t n, std::uint64_t seed);

}  // namespace delco
