#pragma once

// Center-based partitional clustering with hard membership and per-point
// weights. With unit weights this is standard K-means; the edge-adaptive
// variant down-weights pixels on strong gradients.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "segkit/error.hpp"
#include "segkit/raster.hpp"

namespace segkit {

/// n x d, one point per row.
template <typename Scalar>
using PointSet = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Weights = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Hard membership: entry i is the cluster holding point i.
using Assignment = Eigen::VectorXi;

template <typename Scalar>
struct ClusterModel {
  /// k x d, one center per row.
  PointSet<Scalar> centers;

  Eigen::Index k() const { return centers.rows(); }
};

enum class InitStrategy { Quantile, SeededRandom };

struct ClusteringConfig {
  int k = 2;
  int max_iter = 100;
  double epsilon = 1e-4;
  InitStrategy init = InitStrategy::Quantile;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct ClusteringResult {
  ClusterModel<Scalar> model;
  Assignment assignment;
  std::vector<Scalar> sse_trace;
  int iterations = 0;
  bool converged = false;
};

/// 64-bit LCG (Knuth MMIX constants); each draw advances the state and
/// yields its high 32 bits.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint32_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<std::uint32_t>(state_ >> 32);
  }

 private:
  std::uint64_t state_;
};

inline void validate(const ClusteringConfig& config) {
  if (config.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (config.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  if (!(config.epsilon >= 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be nonnegative");
}

template <typename Scalar>
ClusterModel<Scalar> init_centers(const PointSet<Scalar>& points, const ClusteringConfig& config) {
  validate(config);
  const Eigen::Index n = points.rows();
  if (config.k > n) {
    throw Error(ErrorCode::TooFewPoints,
                "k = " + std::to_string(config.k) + " exceeds point count " + std::to_string(n));
  }
  ClusterModel<Scalar> model{PointSet<Scalar>(config.k, points.cols())};

  if (config.init == InitStrategy::Quantile) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      for (Eigen::Index c = 0; c < points.cols(); ++c) {
        if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
      }
      return a < b;
    });
    for (int j = 0; j < config.k; ++j) {
      // floor((j + 0.5) n / k) in exact integer arithmetic
      const auto pick = static_cast<std::size_t>(((2 * static_cast<std::int64_t>(j) + 1) * n) / (2 * config.k));
      model.centers.row(j) = points.row(order[pick]);
    }
    return model;
  }

  Lcg64 rng(config.seed);
  std::vector<Eigen::Index> chosen;
  while (static_cast<int>(chosen.size()) < config.k) {
    const auto idx = static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(n));
    if (std::find(chosen.begin(), chosen.end(), idx) != chosen.end()) continue;
    model.centers.row(static_cast<Eigen::Index>(chosen.size())) = points.row(idx);
    chosen.push_back(idx);
  }
  return model;
}

template <typename Scalar>
Scalar squared_distance(const auto& a, const auto& b) {
  Scalar acc = 0;
  for (Eigen::Index c = 0; c < a.size(); ++c) {
    const Scalar diff = a(c) - b(c);
    acc += diff * diff;
  }
  return acc;
}

template <typename Scalar>
Assignment assign_points(const PointSet<Scalar>& points, const ClusterModel<Scalar>& model) {
  if (points.cols() != model.centers.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "point and center dimensions differ");
  }
  Assignment out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    Scalar best_d = squared_distance<Scalar>(points.row(i), model.centers.row(0));
    for (Eigen::Index j = 1; j < model.k(); ++j) {
      const Scalar d = squared_distance<Scalar>(points.row(i), model.centers.row(j));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    out[i] = best;
  }
  return out;
}

/// Weighted means of each cluster, summed in ascending point order. A cluster
/// with no members, or only zero-weight members, is re-seeded at the point
/// farthest (weighted squared distance) from its own freshly computed center;
/// each point re-seeds at most one cluster per call.
template <typename Scalar>
ClusterModel<Scalar> update_centers(const PointSet<Scalar>& points, const Assignment& assignment,
                                    const Weights<Scalar>& weights, int k) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (assignment.size() != n || weights.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "assignment and weights must have one entry per point");
  }
  PointSet<Scalar> numer = PointSet<Scalar>::Zero(k, d);
  std::vector<Scalar> denom(static_cast<std::size_t>(k), Scalar(0));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = assignment[i];
    if (j < 0 || j >= k) throw Error(ErrorCode::InvalidArgument, "assignment index out of range");
    const Scalar w = weights[i];
    for (Eigen::Index c = 0; c < d; ++c) numer(j, c) += w * points(i, c);
    denom[static_cast<std::size_t>(j)] += w;
  }

  ClusterModel<Scalar> model{PointSet<Scalar>::Zero(k, d)};
  std::vector<int> empty;
  for (int j = 0; j < k; ++j) {
    const Scalar den = denom[static_cast<std::size_t>(j)];
    if (den > 0) {
      for (Eigen::Index c = 0; c < d; ++c) model.centers(j, c) = numer(j, c) / den;
    } else {
      empty.push_back(j);
    }
  }
  if (empty.empty()) return model;

  std::vector<Scalar> spread(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = assignment[i];
    spread[static_cast<std::size_t>(i)] =
        denom[static_cast<std::size_t>(j)] > 0
            ? weights[i] * squared_distance<Scalar>(points.row(i), model.centers.row(j))
            : Scalar(0);
  }
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const int j : empty) {
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if (pick < 0 || spread[static_cast<std::size_t>(i)] > spread[static_cast<std::size_t>(pick)]) pick = i;
    }
    if (pick < 0) break;  // more empty clusters than points; only reachable when k > n
    used[static_cast<std::size_t>(pick)] = true;
    model.centers.row(j) = points.row(pick);
  }
  return model;
}

template <typename Scalar>
Scalar weighted_sse(const PointSet<Scalar>& points, const ClusterModel<Scalar>& model, const Assignment& assignment,
                    const Weights<Scalar>& weights) {
  Scalar acc = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    acc += weights[i] * squared_distance<Scalar>(points.row(i), model.centers.row(assignment[i]));
  }
  return acc;
}

/// Alternates nearest-center assignment and weighted center updates until no
/// center moves by more than epsilon (infinity norm) or max_iter is reached.
/// The returned model holds the centers recomputed from the returned assignment.
template <typename Scalar>
ClusteringResult<Scalar> run_kmeans(const PointSet<Scalar>& points, const Weights<Scalar>& weights,
                                    const ClusteringConfig& config) {
  if (weights.size() != points.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "weights must have one entry per point");
  }
  if ((weights.array() < 0).any() || !(weights.array() > 0).any()) {
    throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative with at least one positive entry");
  }
  ClusteringResult<Scalar> result;
  result.model = init_centers(points, config);
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    result.assignment = assign_points(points, result.model);
    result.sse_trace.push_back(weighted_sse(points, result.model, result.assignment, weights));
    auto next = update_centers(points, result.assignment, weights, config.k);
    const Scalar movement = (next.centers - result.model.centers).cwiseAbs().maxCoeff();
    result.model = std::move(next);
    result.iterations = iter;
    if (movement <= static_cast<Scalar>(config.epsilon)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

/// Per-pixel weights 1 / (1 + beta * g), g the gradient magnitude scaled by
/// its maximum (zero everywhere for a flat gradient).
Weights<double> edge_weights(const GradientMap& gradient, double beta);

struct ClusterSegmentation {
  LabelMap labels;
  ClusteringResult<double> clustering;
  /// Weighted SSE of the returned model against the returned assignment.
  double sse = 0;
};

inline constexpr double kDefaultEdgeBeta = 2.0;

/// Clusters pixel intensities; with `beta` set, pixels are weighted by
/// edge_weights(sobel_magnitude(image), beta).
ClusterSegmentation segment_clustering(const GrayImage& image, const ClusteringConfig& config,
                                       std::optional<double> beta = std::nullopt);

}  // namespace segkit
