#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "segkit/raster.hpp"

namespace segkit {

struct FeatureVector {
  Eigen::VectorXd bins;
  bool normalized = false;

  Eigen::Index dimension() const { return bins.size(); }
};

/// Raw integer histogram; the normalized feature is counts / total.
struct CountFeature {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> counts;
  std::int64_t total = 0;

  FeatureVector normalized() const;
  friend bool operator==(const CountFeature& a, const CountFeature& b) {
    return a.total == b.total && a.counts.size() == b.counts.size() && a.counts == b.counts;
  }
};

struct Exemplar {
  std::int32_t label = 0;
  FeatureVector feature;
};

inline constexpr int kGrayBins = 256;
inline constexpr int kColorBins = 64;
inline constexpr int kDefaultFeatureWindow = 9;

double l1_distance(const FeatureVector& a, const FeatureVector& b);

/// Normalized 256-bin histogram of the window x window neighborhood centered
/// at (x, y), coordinates clamped at the borders.
FeatureVector local_histogram(const GrayImage& image, Eigen::Index x, Eigen::Index y, int window);

/// Labels every pixel with the exemplar nearest (L1) to its local histogram;
/// ties go to the exemplar listed first. k is one past the largest label.
LabelMap classify_windows(const GrayImage& image, const std::vector<Exemplar>& exemplars, int window);

/// Synchronous boundary relabeling against per-class mean local histograms,
/// up to `iterations` rounds or until a round changes nothing.
LabelMap refine_boundaries(const LabelMap& labels, const GrayImage& image, int window, int iterations);

CountFeature global_counts(const GrayImage& image);
/// 4x4x4 color cube, bin (r/64)*16 + (g/64)*4 + b/64.
CountFeature global_counts(const RgbImage& image);
CountFeature global_counts(const AnyImage& image);

FeatureVector global_feature(const AnyImage& image);

}  // namespace segkit
