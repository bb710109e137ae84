#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "segkit/raster.hpp"

namespace segkit {

struct RegionParams {
  int smooth_radius = 1;
  double variance_threshold = 25.0;
  int min_seed_size = 9;
  int min_region_size = 16;
  double contrast_guard = 40.0;
};

struct RegionStats {
  std::int32_t label = 0;
  std::int64_t size = 0;
  double mean = 0;
  double variance = 0;
  /// Inclusive bounding box (x0, y0, x1, y1).
  std::array<Eigen::Index, 4> bbox{};
  double size_fraction = 0;
  double boundary_fraction = 0;
};

struct SegmentationResult {
  LabelMap labels;
  std::vector<RegionStats> stats;
  int seed_count = 0;
  int merged = 0;
};

void validate(const RegionParams& params);

/// Pixels whose clamped 3x3 neighborhood has population variance at most
/// `variance_threshold`, grouped into 4-connected components of at least
/// `min_seed_size` pixels. Components are numbered in raster order of their
/// first pixel; everything else is kUnlabeled. Throws NoSeeds.
LabelMap select_seeds(const GrayImage& image, const RegionParams& params);

/// Best-first seeded region growing. Candidates (pixel, adjacent region) are
/// keyed by |intensity - region mean| with the mean taken when the candidate
/// is queued; ties go to the lower raster index, then the lower label.
LabelMap grow_regions(const GrayImage& image, const LabelMap& seeds);

/// Merges regions smaller than `min_region_size` into their nearest-mean
/// 4-neighbor, smallest first, unless every neighbor differs in mean by more
/// than `contrast_guard`. Labels are compacted in raster order.
LabelMap merge_small_regions(const LabelMap& labels, const GrayImage& image, const RegionParams& params);

/// Statistics for every label that occurs in the map, in label order.
std::vector<RegionStats> region_stats(const LabelMap& labels, const GrayImage& image);

/// Smooth, select seeds, grow, merge; statistics come from the unsmoothed image.
SegmentationResult primary_segment(const GrayImage& image, const RegionParams& params = {});

/// Renumbers labels 0..k'-1 in raster order of first occurrence.
LabelMap compact_labels(const LabelMap& labels);

/// True if every label's pixels form a single 4-connected component.
bool regions_are_connected(const LabelMap& labels);

}  // namespace segkit
