#include "segkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segkit/error.hpp"

namespace segkit {

namespace {

void require_odd_window(int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::EvenWindow, "window must be odd and positive, got " + std::to_string(window));
  }
}

// Adds the clamped window samples around (x, y) to `counts`.
template <typename Counts>
void accumulate_window(const GrayImage& image, Eigen::Index x, Eigen::Index y, int half, Counts& counts) {
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  for (int dy = -half; dy <= half; ++dy) {
    const auto yy = std::clamp<Eigen::Index>(y + dy, 0, h - 1);
    for (int dx = -half; dx <= half; ++dx) {
      ++counts[image(yy, std::clamp<Eigen::Index>(x + dx, 0, w - 1))];
    }
  }
}

int nearest(const FeatureVector& query, const std::vector<const FeatureVector*>& candidates) {
  int best = -1;
  double best_d = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (candidates[c] == nullptr) continue;
    const double d = l1_distance(query, *candidates[c]);
    if (best < 0 || d < best_d) {
      best = static_cast<int>(c);
      best_d = d;
    }
  }
  return best;
}

}  // namespace

FeatureVector CountFeature::normalized() const {
  FeatureVector f;
  f.bins = counts.cast<double>() / static_cast<double>(total);
  f.normalized = true;
  return f;
}

double l1_distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimensions " + std::to_string(a.dimension()) + " and " +
                                                  std::to_string(b.dimension()));
  }
  double acc = 0;
  for (Eigen::Index i = 0; i < a.dimension(); ++i) acc += std::abs(a.bins[i] - b.bins[i]);
  return acc;
}

FeatureVector local_histogram(const GrayImage& image, Eigen::Index x, Eigen::Index y, int window) {
  require_odd_window(window);
  if (x < 0 || y < 0 || x >= image.cols() || y >= image.rows()) {
    throw Error(ErrorCode::InvalidArgument, "window center outside the image");
  }
  CountFeature c{Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(kGrayBins),
                 static_cast<std::int64_t>(window) * window};
  accumulate_window(image, x, y, window / 2, c.counts);
  return c.normalized();
}

LabelMap classify_windows(const GrayImage& image, const std::vector<Exemplar>& exemplars, int window) {
  require_odd_window(window);
  if (exemplars.empty()) throw Error(ErrorCode::NoExemplars, "window classification needs at least one exemplar");
  std::vector<const FeatureVector*> features;
  std::int32_t max_label = 0;
  for (const auto& e : exemplars) {
    if (e.feature.dimension() != kGrayBins) {
      throw Error(ErrorCode::DimensionMismatch, "exemplar features must have 256 bins");
    }
    if (e.label < 0) throw Error(ErrorCode::InvalidArgument, "exemplar labels must be nonnegative");
    features.push_back(&e.feature);
    max_label = std::max(max_label, e.label);
  }

  LabelMap out;
  out.labels.resize(image.rows(), image.cols());
  out.k = max_label + 1;
  out.complete = true;
  for (Eigen::Index y = 0; y < image.rows(); ++y) {
    for (Eigen::Index x = 0; x < image.cols(); ++x) {
      out.labels(y, x) = exemplars[static_cast<std::size_t>(nearest(local_histogram(image, x, y, window), features))].label;
    }
  }
  return out;
}

LabelMap refine_boundaries(const LabelMap& labels, const GrayImage& image, int window, int iterations) {
  require_odd_window(window);
  if (iterations < 0) throw Error(ErrorCode::InvalidArgument, "iteration count must be nonnegative");
  if (!labels.complete || !labels.is_valid()) {
    throw Error(ErrorCode::IncompleteLabels, "boundary refinement needs a complete label map");
  }
  if (labels.height() != image.rows() || labels.width() != image.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "label map and image sizes differ");
  }
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  const auto k = static_cast<std::size_t>(labels.k);
  const int half = window / 2;
  const std::int64_t samples = static_cast<std::int64_t>(window) * window;

  LabelMap current = labels;
  for (int iter = 0; iter < iterations; ++iter) {
    std::vector<Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>> class_counts(
        k, Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(kGrayBins));
    std::vector<std::int64_t> members(k, 0);
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) {
        const auto c = static_cast<std::size_t>(current.labels(y, x));
        accumulate_window(image, x, y, half, class_counts[c]);
        ++members[c];
      }
    }
    std::vector<FeatureVector> means(k);
    std::vector<const FeatureVector*> candidates(k, nullptr);
    for (std::size_t c = 0; c < k; ++c) {
      if (members[c] == 0) continue;
      means[c] = CountFeature{class_counts[c], members[c] * samples}.normalized();
      candidates[c] = &means[c];
    }

    LabelMap next = current;
    bool changed = false;
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) {
        const auto l = current.labels(y, x);
        const bool boundary = (y > 0 && current.labels(y - 1, x) != l) || (x > 0 && current.labels(y, x - 1) != l) ||
                              (x + 1 < w && current.labels(y, x + 1) != l) ||
                              (y + 1 < h && current.labels(y + 1, x) != l);
        if (!boundary) continue;
        const auto best = static_cast<std::int32_t>(nearest(local_histogram(image, x, y, window), candidates));
        if (best != l) {
          next.labels(y, x) = best;
          changed = true;
        }
      }
    }
    current = std::move(next);
    if (!changed) break;
  }
  return current;
}

CountFeature global_counts(const GrayImage& image) {
  CountFeature c{Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(kGrayBins), image.size()};
  for (Eigen::Index i = 0; i < image.size(); ++i) ++c.counts[image.data()[i]];
  return c;
}

CountFeature global_counts(const RgbImage& image) {
  CountFeature c{Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(kColorBins), image.pixels.rows()};
  for (Eigen::Index i = 0; i < image.pixels.rows(); ++i) {
    const int bin = (image.pixels(i, 0) / 64) * 16 + (image.pixels(i, 1) / 64) * 4 + image.pixels(i, 2) / 64;
    ++c.counts[bin];
  }
  return c;
}

CountFeature global_counts(const AnyImage& image) {
  return std::visit([](const auto& img) { return global_counts(img); }, image);
}

FeatureVector global_feature(const AnyImage& image) { return global_counts(image).normalized(); }

}  // namespace segkit
