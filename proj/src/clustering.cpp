#include "segkit/clustering.hpp"

namespace segkit {

Weights<double> edge_weights(const GradientMap& gradient, double beta) {
  if (!(beta >= 0)) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
  Weights<double> w(gradient.size());
  const double peak = gradient.size() > 0 ? gradient.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < gradient.size(); ++i) {
    const double scaled = peak > 0 ? gradient.data()[i] / peak : 0.0;
    w[i] = 1.0 / (1.0 + beta * scaled);
  }
  return w;
}

ClusterSegmentation segment_clustering(const GrayImage& image, const ClusteringConfig& config,
                                       std::optional<double> beta) {
  const PointSet<double> points =
      Eigen::Map<const Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>>(image.data(), image.size())
          .cast<double>()
          .matrix();
  const Weights<double> weights =
      beta ? edge_weights(sobel_magnitude(image), *beta) : Weights<double>::Ones(image.size());

  ClusterSegmentation out;
  out.clustering = run_kmeans(points, weights, config);
  out.sse = weighted_sse(points, out.clustering.model, out.clustering.assignment, weights);
  out.labels.labels = Eigen::Map<const Plane<int>>(out.clustering.assignment.data(), image.rows(), image.cols())
                          .cast<std::int32_t>();
  out.labels.k = config.k;
  out.labels.complete = true;
  return out;
}

}  // namespace segkit
