#pragma once

// Synthetic images with known ground truth, shared by the unit tests, the
// acceptance suite and the fixture writer tool.

#include <cstdint>
#include <random>

#include <vector>

#include "segkit/features.hpp"
#include "segkit/raster.hpp"

namespace segkit::fixtures {

/// Deterministic normal draws (Box-Muller over mt19937_64) so fixtures are
/// identical across standard libraries.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()();
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Left half (x < width/2) `lo`, right half `hi`.
GrayImage two_half(Eigen::Index width, Eigen::Index height, std::uint8_t lo = 10, std::uint8_t hi = 200);

/// two_half plus rounded Gaussian noise, clamped to [0, 255].
GrayImage noisy_two_half(Eigen::Index size, double sigma, std::uint64_t seed);

/// Ground truth for the two-half fixtures: 1 on the right half.
LabelMap two_half_truth(Eigen::Index width, Eigen::Index height);

/// 64x64: 60 on the left, 190 on the right, a linear ramp across columns
/// 28..35, Gaussian noise sigma 4 and 4% salt-and-pepper speckle.
GrayImage ramp_edge_speckle(std::uint64_t seed = 2024);

/// Ground truth for ramp_edge_speckle: 1 for x >= 32.
LabelMap ramp_edge_truth();

/// 0/255 checkerboard; every clamped 3x3 neighborhood is mixed.
GrayImage checkerboard(Eigen::Index width, Eigen::Index height);

GrayImage random_gray(Eigen::Index width, Eigen::Index height, std::mt19937_64& rng);

/// Piecewise-constant random image: a few vertical bands plus noise.
GrayImage random_banded(Eigen::Index width, Eigen::Index height, std::mt19937_64& rng);

RgbImage random_rgb(Eigen::Index width, Eigen::Index height, std::mt19937_64& rng);

/// Histogram of `samples` draws spread over `dim` bins with random mass.
CountFeature random_counts(int dim, std::int64_t samples, std::mt19937_64& rng);

/// Sample histogram drawn uniformly from `width` consecutive bins at `offset`.
CountFeature band_counts(int dim, int offset, int width, std::int64_t samples, std::mt19937_64& rng);

/// Records scattered around ten 256-bin prototypes of distinct spread, so
/// their distances to the uniform pivot fall into separated bands. Cluster
/// c of record i is i % 10; `query_for(c)` draws a fresh member.
struct ClusteredCorpus {
  std::vector<CountFeature> records;
  std::vector<int> cluster_of;
  CountFeature query_for(int cluster, std::mt19937_64& rng) const;
};
ClusteredCorpus clustered_corpus(std::size_t n, std::uint64_t seed);

/// Number of pixels where the labels differ.
Eigen::Index mismatches(const LabelMap& a, const LabelMap& b);

/// Fraction of pixels agreeing with `truth`, maximized over swapping labels
/// 0 and 1 (clusters carry no intrinsic order).
double two_class_agreement(const LabelMap& labels, const LabelMap& truth);

}  // namespace segkit::fixtures
