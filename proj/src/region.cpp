#include "segkit/region.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <string>

#include "segkit/error.hpp"

namespace segkit {

namespace {

__extension__ using Wide = __int128;

template <typename Visit>
void for_each_neighbor4(Eigen::Index idx, Eigen::Index width, Eigen::Index height, Visit&& visit) {
  const Eigen::Index y = idx / width;
  const Eigen::Index x = idx % width;
  if (y > 0) visit(idx - width);
  if (x > 0) visit(idx - 1);
  if (x + 1 < width) visit(idx + 1);
  if (y + 1 < height) visit(idx + width);
}

void require_same_shape(const LabelMap& labels, const GrayImage& image) {
  if (labels.height() != image.rows() || labels.width() != image.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "label map and image sizes differ");
  }
}

void require_complete(const LabelMap& labels) {
  if (!labels.complete || !labels.is_valid()) {
    throw Error(ErrorCode::IncompleteLabels, "operation needs a complete label map");
  }
}

struct GrowCandidate {
  // |v - sum/count| == distance_num / distance_den
  std::int64_t distance_num;
  std::int64_t distance_den;
  Eigen::Index pixel;
  std::int32_t label;
};

// Priority-queue comparator: true when `a` should pop after `b`.
struct PopsLater {
  bool operator()(const GrowCandidate& a, const GrowCandidate& b) const {
    const Wide lhs = static_cast<Wide>(a.distance_num) * b.distance_den;
    const Wide rhs = static_cast<Wide>(b.distance_num) * a.distance_den;
    if (lhs != rhs) return lhs > rhs;
    if (a.pixel != b.pixel) return a.pixel > b.pixel;
    return a.label > b.label;
  }
};

}  // namespace

void validate(const RegionParams& params) {
  if (params.smooth_radius < 0 || params.variance_threshold < 0 || params.min_region_size < 0 ||
      params.contrast_guard < 0 || params.min_seed_size < 1) {
    throw Error(ErrorCode::InvalidArgument, "region parameters must be nonnegative and min_seed_size >= 1");
  }
}

LabelMap select_seeds(const GrayImage& image, const RegionParams& params) {
  validate(params);
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  const Eigen::Index n = image.size();

  std::vector<char> eligible(static_cast<std::size_t>(n), 0);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      std::int64_t sum = 0, sum_sq = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const std::int64_t v = image(std::clamp<Eigen::Index>(y + dy, 0, h - 1),
                                       std::clamp<Eigen::Index>(x + dx, 0, w - 1));
          sum += v;
          sum_sq += v * v;
        }
      }
      // population variance = (9 sum_sq - sum^2) / 81
      const double variance = static_cast<double>(9 * sum_sq - sum * sum) / 81.0;
      eligible[static_cast<std::size_t>(y * w + x)] = variance <= params.variance_threshold;
    }
  }

  LabelMap seeds;
  seeds.labels = Plane<std::int32_t>::Constant(h, w, kUnlabeled);
  seeds.complete = false;
  std::int32_t next = 0;
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> component;
  for (Eigen::Index start = 0; start < n; ++start) {
    if (!eligible[static_cast<std::size_t>(start)] || visited[static_cast<std::size_t>(start)]) continue;
    component.clear();
    component.push_back(start);
    visited[static_cast<std::size_t>(start)] = 1;
    for (std::size_t head = 0; head < component.size(); ++head) {
      for_each_neighbor4(component[head], w, h, [&](Eigen::Index nb) {
        const auto u = static_cast<std::size_t>(nb);
        if (eligible[u] && !visited[u]) {
          visited[u] = 1;
          component.push_back(nb);
        }
      });
    }
    if (static_cast<int>(component.size()) < params.min_seed_size) continue;
    for (const auto idx : component) seeds.labels.data()[idx] = next;
    ++next;
  }
  if (next == 0) {
    throw Error(ErrorCode::NoSeeds, "no homogeneous component of at least " + std::to_string(params.min_seed_size) +
                                        " pixels; parameters are too strict for this image");
  }
  seeds.k = next;
  return seeds;
}

LabelMap grow_regions(const GrayImage& image, const LabelMap& seeds) {
  require_same_shape(seeds, image);
  if (seeds.k < 1 || !seeds.is_valid() || (seeds.labels < 0).all()) {
    throw Error(ErrorCode::EmptySeeds, "region growing needs at least one seed pixel");
  }
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  LabelMap out = seeds;
  auto* labels = out.labels.data();
  const auto* pixels = image.data();

  std::vector<std::int64_t> sum(static_cast<std::size_t>(seeds.k), 0), count(static_cast<std::size_t>(seeds.k), 0);
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    if (labels[i] >= 0) {
      sum[static_cast<std::size_t>(labels[i])] += pixels[i];
      ++count[static_cast<std::size_t>(labels[i])];
    }
  }

  std::priority_queue<GrowCandidate, std::vector<GrowCandidate>, PopsLater> queue;
  auto enqueue_neighbors = [&](Eigen::Index idx) {
    const auto label = labels[idx];
    const auto r = static_cast<std::size_t>(label);
    for_each_neighbor4(idx, w, h, [&](Eigen::Index nb) {
      if (labels[nb] != kUnlabeled) return;
      const std::int64_t num = std::abs(static_cast<std::int64_t>(pixels[nb]) * count[r] - sum[r]);
      queue.push({num, count[r], nb, label});
    });
  };

  for (Eigen::Index i = 0; i < image.size(); ++i) {
    if (labels[i] >= 0) enqueue_neighbors(i);
  }
  while (!queue.empty()) {
    const auto top = queue.top();
    queue.pop();
    if (labels[top.pixel] != kUnlabeled) continue;
    labels[top.pixel] = top.label;
    sum[static_cast<std::size_t>(top.label)] += pixels[top.pixel];
    ++count[static_cast<std::size_t>(top.label)];
    enqueue_neighbors(top.pixel);
  }
  out.complete = true;
  return out;
}

LabelMap compact_labels(const LabelMap& labels) {
  std::map<std::int32_t, std::int32_t> remap;
  LabelMap out = labels;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const auto l = labels[i];
    if (l == kUnlabeled) continue;
    auto [it, inserted] = remap.try_emplace(l, static_cast<std::int32_t>(remap.size()));
    out.labels.data()[i] = it->second;
  }
  out.k = std::max<std::int32_t>(1, static_cast<std::int32_t>(remap.size()));
  return out;
}

LabelMap merge_small_regions(const LabelMap& labels, const GrayImage& image, const RegionParams& params) {
  validate(params);
  require_same_shape(labels, image);
  require_complete(labels);
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  const auto k = static_cast<std::size_t>(labels.k);

  std::vector<std::int64_t> size(k, 0), sum(k, 0);
  std::vector<std::set<std::int32_t>> adjacent(k);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const auto l = labels[i];
    ++size[static_cast<std::size_t>(l)];
    sum[static_cast<std::size_t>(l)] += image.data()[i];
    for_each_neighbor4(i, w, h, [&](Eigen::Index nb) {
      if (labels[nb] != l) adjacent[static_cast<std::size_t>(l)].insert(labels[nb]);
    });
  }
  auto mean = [&](std::int32_t r) {
    return static_cast<double>(sum[static_cast<std::size_t>(r)]) / static_cast<double>(size[static_cast<std::size_t>(r)]);
  };

  // small regions ordered by (size, label)
  std::set<std::pair<std::int64_t, std::int32_t>> small;
  for (std::size_t r = 0; r < k; ++r) {
    if (size[r] > 0 && size[r] < params.min_region_size) small.emplace(size[r], static_cast<std::int32_t>(r));
  }
  std::vector<std::int32_t> merged_into(k);
  for (std::size_t r = 0; r < k; ++r) merged_into[r] = static_cast<std::int32_t>(r);

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = small.begin(); it != small.end(); ++it) {
      const auto [region_size, r] = *it;
      const double m = mean(r);
      std::int32_t target = -1;
      double best = 0;
      for (const auto nb : adjacent[static_cast<std::size_t>(r)]) {
        const double diff = std::abs(mean(nb) - m);
        if (target < 0 || diff < best) {
          target = nb;
          best = diff;
        }
      }
      if (target < 0 || best > params.contrast_guard) continue;

      const auto rs = static_cast<std::size_t>(r);
      const auto ts = static_cast<std::size_t>(target);
      small.erase({region_size, r});
      small.erase({size[ts], target});
      size[ts] += size[rs];
      sum[ts] += sum[rs];
      size[rs] = 0;
      for (const auto nb : adjacent[rs]) {
        auto& nb_adj = adjacent[static_cast<std::size_t>(nb)];
        nb_adj.erase(r);
        if (nb != target) {
          nb_adj.insert(target);
          adjacent[ts].insert(nb);
        }
      }
      adjacent[rs].clear();
      merged_into[rs] = target;
      if (size[ts] < params.min_region_size) small.emplace(size[ts], target);
      changed = true;
      break;
    }
  }

  LabelMap out = labels;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    auto l = out.labels.data()[i];
    while (merged_into[static_cast<std::size_t>(l)] != l) l = merged_into[static_cast<std::size_t>(l)];
    out.labels.data()[i] = l;
  }
  return compact_labels(out);
}

std::vector<RegionStats> region_stats(const LabelMap& labels, const GrayImage& image) {
  require_same_shape(labels, image);
  require_complete(labels);
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  const auto k = static_cast<std::size_t>(labels.k);

  std::vector<std::int64_t> size(k, 0), sum(k, 0), sum_sq(k, 0), boundary(k, 0);
  std::vector<std::array<Eigen::Index, 4>> bbox(k, {w, h, -1, -1});
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const auto l = static_cast<std::size_t>(labels[i]);
    const std::int64_t v = image.data()[i];
    ++size[l];
    sum[l] += v;
    sum_sq[l] += v * v;
    const Eigen::Index y = i / w, x = i % w;
    auto& box = bbox[l];
    box = {std::min(box[0], x), std::min(box[1], y), std::max(box[2], x), std::max(box[3], y)};
    bool on_boundary = false;
    for_each_neighbor4(i, w, h, [&](Eigen::Index nb) { on_boundary |= labels[nb] != labels[i]; });
    boundary[l] += on_boundary;
  }

  std::vector<RegionStats> stats;
  const auto total = static_cast<double>(labels.size());
  for (std::size_t l = 0; l < k; ++l) {
    if (size[l] == 0) continue;
    RegionStats s;
    s.label = static_cast<std::int32_t>(l);
    s.size = size[l];
    const auto n = static_cast<double>(size[l]);
    s.mean = static_cast<double>(sum[l]) / n;
    // exact integer numerator keeps the variance nonnegative
    s.variance = static_cast<double>(size[l] * sum_sq[l] - sum[l] * sum[l]) / (n * n);
    s.bbox = bbox[l];
    s.size_fraction = n / total;
    s.boundary_fraction = static_cast<double>(boundary[l]) / n;
    stats.push_back(s);
  }
  return stats;
}

SegmentationResult primary_segment(const GrayImage& image, const RegionParams& params) {
  validate(params);
  const GrayImage smoothed = box_smooth(image, params.smooth_radius);
  const LabelMap seeds = select_seeds(smoothed, params);
  const LabelMap grown = grow_regions(smoothed, seeds);

  SegmentationResult result;
  result.labels = merge_small_regions(grown, smoothed, params);
  result.stats = region_stats(result.labels, image);
  result.seed_count = seeds.k;
  result.merged = grown.k - result.labels.k;
  return result;
}

bool regions_are_connected(const LabelMap& labels) {
  const Eigen::Index h = labels.height();
  const Eigen::Index w = labels.width();
  std::vector<char> seen_label(static_cast<std::size_t>(std::max(labels.k, 0)) + 1, 0);
  std::vector<char> visited(static_cast<std::size_t>(labels.size()), 0);
  std::vector<Eigen::Index> stack;
  for (Eigen::Index start = 0; start < labels.size(); ++start) {
    const auto l = labels[start];
    if (l < 0 || visited[static_cast<std::size_t>(start)]) continue;
    if (seen_label[static_cast<std::size_t>(l)]) return false;
    seen_label[static_cast<std::size_t>(l)] = 1;
    stack.assign(1, start);
    visited[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const auto idx = stack.back();
      stack.pop_back();
      for_each_neighbor4(idx, w, h, [&](Eigen::Index nb) {
        if (!visited[static_cast<std::size_t>(nb)] && labels[nb] == l) {
          visited[static_cast<std::size_t>(nb)] = 1;
          stack.push_back(nb);
        }
      });
    }
  }
  return true;
}

}  // namespace segkit
