#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <Eigen/Core>

#include "segkit/raster.hpp"

namespace segkit {

/// Gray-level counts, one bin per 8-bit intensity.
struct Histogram {
  Eigen::Array<std::int64_t, 256, 1> counts = Eigen::Array<std::int64_t, 256, 1>::Zero();
  std::int64_t total = 0;
};

using SmoothHistogram = Eigen::Array<double, 256, 1>;

enum class ThresholdMethod { Valley, Otsu };

struct ThresholdReport {
  int level = 0;
  ThresholdMethod method = ThresholdMethod::Otsu;
  /// Peak bins (ascending) for the valley method.
  std::optional<std::pair<int, int>> peaks;
};

inline constexpr int kDefaultSmoothWindow = 5;
inline constexpr int kDefaultMinSeparation = 16;

Histogram gray_histogram(const GrayImage& image);

/// Centered moving average over `window` bins, replicating bins 0 and 255
/// past the ends. Total mass is conserved when no mass lies within
/// window/2 bins of either end.
SmoothHistogram smooth_histogram(const Histogram& h, int window);
SmoothHistogram smooth_histogram(const SmoothHistogram& h, int window);

/// Level at the deepest point between the two dominant, well separated peaks
/// of the smoothed histogram. Throws NoTwoPeaks when no such pair exists.
ThresholdReport valley_threshold(const Histogram& h, int smooth_window = kDefaultSmoothWindow,
                                 int min_separation = kDefaultMinSeparation);

/// Otsu's between-class-variance maximizer; class 0 is [0, t], ties go to
/// the smallest t.
ThresholdReport otsu_threshold(const Histogram& h);

/// Between-class variance w0 w1 (mu0 - mu1)^2 at threshold t; 0 if a class is empty.
double between_class_variance(const Histogram& h, int t);

/// Label 1 where the pixel exceeds `level`, 0 elsewhere.
LabelMap binarize(const GrayImage& image, int level);

}  // namespace segkit
