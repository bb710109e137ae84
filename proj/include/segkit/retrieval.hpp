#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "segkit/features.hpp"
#include "segkit/raster.hpp"

namespace segkit {

struct ImageRecord {
  std::uint64_t id = 0;
  std::string path;
  std::string description;
  CountFeature counts;
  FeatureVector feature;
  /// L1 distance from `feature` to the index pivot.
  double pivot_distance = 0;
};

struct RankedResult {
  std::uint64_t id = 0;
  double score = 0;
  std::string path;
  std::string description;

  friend bool operator==(const RankedResult&, const RankedResult&) = default;
};

struct OptimizedSearch {
  std::vector<RankedResult> results;
  std::size_t candidates_examined = 0;
};

/// In-memory image database. Not internally synchronized: concurrent const
/// access (searches) is safe, ingest needs exclusive access.
class Index {
 public:
  static constexpr int kFormatVersion = 1;

  /// 256 (gray) or 64 (color) once the first record is ingested; 0 before.
  int feature_dim() const { return feature_dim_; }
  const std::vector<ImageRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  /// Uniform histogram of the index dimension.
  FeatureVector pivot() const;

  std::uint64_t ingest(const AnyImage& image, std::string description, std::string path);
  std::uint64_t ingest(CountFeature counts, std::string description, std::string path);

  /// Record ids ordered by (pivot_distance, id).
  const std::vector<std::uint64_t>& pivot_order() const { return pivot_order_; }

  friend bool operator==(const Index& a, const Index& b);

 private:
  int feature_dim_ = 0;
  std::vector<ImageRecord> records_;
  std::vector<std::uint64_t> pivot_order_;
};

/// Histogram intersection, sum of bin-wise minima.
double similarity(const FeatureVector& a, const FeatureVector& b);

/// Scores every record; best first, ties by ascending id.
std::vector<RankedResult> search_exhaustive(const Index& index, const FeatureVector& query, std::size_t top);

/// Same results as search_exhaustive. Records are visited in ascending order
/// of the triangle-inequality bound |d(r, pivot) - d(q, pivot)| and the scan
/// stops once that bound exceeds the current k-th best L1 distance.
OptimizedSearch search_optimized(const Index& index, const FeatureVector& query, std::size_t top);

std::string encode_index(const Index& index);
Index decode_index(std::string_view text);

std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

}  // namespace segkit
