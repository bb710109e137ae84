#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace segkit::fixtures {

double Gaussian::operator()() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint8_t clamp_round(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

GrayImage two_half(Eigen::Index width, Eigen::Index height, std::uint8_t lo, std::uint8_t hi) {
  GrayImage img(height, width);
  img.leftCols(width / 2).setConstant(lo);
  img.rightCols(width - width / 2).setConstant(hi);
  return img;
}

GrayImage noisy_two_half(Eigen::Index size, double sigma, std::uint64_t seed) {
  Gaussian noise(seed);
  GrayImage img = two_half(size, size);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = clamp_round(img.data()[i] + sigma * noise());
  return img;
}

LabelMap two_half_truth(Eigen::Index width, Eigen::Index height) {
  LabelMap truth;
  truth.labels = Plane<std::int32_t>::Zero(height, width);
  truth.labels.rightCols(width - width / 2).setOnes();
  truth.k = 2;
  return truth;
}

GrayImage ramp_edge_speckle(std::uint64_t seed) {
  constexpr Eigen::Index kSize = 64;
  Gaussian noise(seed);
  GrayImage img(kSize, kSize);
  for (Eigen::Index y = 0; y < kSize; ++y) {
    for (Eigen::Index x = 0; x < kSize; ++x) {
      double v = x < 28 ? 60.0 : x > 35 ? 190.0 : 60.0 + 130.0 * (static_cast<double>(x) - 27.5) / 8.0;
      v += 4.0 * noise();
      const double speckle = noise.uniform();
      if (speckle < 0.02) v = 0;
      else if (speckle < 0.04) v = 255;
      img(y, x) = clamp_round(v);
    }
  }
  return img;
}

LabelMap ramp_edge_truth() { return two_half_truth(64, 64); }

GrayImage checkerboard(Eigen::Index width, Eigen::Index height) {
  GrayImage img(height, width);
  for (Eigen::Index y = 0; y < height; ++y)
    for (Eigen::Index x = 0; x < width; ++x) img(y, x) = (x + y) % 2 ? 255 : 0;
  return img;
}

GrayImage random_gray(Eigen::Index width, Eigen::Index height, std::mt19937_64& rng) {
  GrayImage img(height, width);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

GrayImage random_banded(Eigen::Index width, Eigen::Index height, std::mt19937_64& rng) {
  const int bands = 1 + static_cast<int>(rng() % 4);
  std::vector<int> level(static_cast<std::size_t>(bands));
  for (auto& l : level) l = static_cast<int>(rng() % 256);
  const int noise = static_cast<int>(rng() % 12);
  GrayImage img(height, width);
  for (Eigen::Index y = 0; y < height; ++y) {
    for (Eigen::Index x = 0; x < width; ++x) {
      const auto band = static_cast<std::size_t>(x * bands / width);
      const int jitter = noise ? static_cast<int>(rng() % static_cast<std::uint64_t>(2 * noise + 1)) - noise : 0;
      img(y, x) = static_cast<std::uint8_t>(std::clamp(level[band] + jitter, 0, 255));
    }
  }
  return img;
}

RgbImage random_rgb(Eigen::Index width, Eigen::Index height, std::mt19937_64& rng) {
  RgbImage img(width, height);
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i) img.pixels.data()[i] = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

CountFeature random_counts(int dim, std::int64_t samples, std::mt19937_64& rng) {
  CountFeature c{Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(dim), samples};
  // random mass profile, then multinomial-ish sampling through it
  std::vector<double> cdf(static_cast<std::size_t>(dim));
  double acc = 0;
  const int active = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(dim));
  for (int b = 0; b < dim; ++b) {
    acc += (static_cast<int>(rng() % static_cast<std::uint64_t>(dim)) < active) ? static_cast<double>(rng() % 100) + 1 : 0.0;
    cdf[static_cast<std::size_t>(b)] = acc;
  }
  if (acc == 0) {
    c.counts[0] = samples;
    return c;
  }
  for (std::int64_t s = 0; s < samples; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++c.counts[std::min<Eigen::Index>(it - cdf.begin(), dim - 1)];
  }
  return c;
}

CountFeature band_counts(int dim, int offset, int width, std::int64_t samples, std::mt19937_64& rng) {
  CountFeature c{Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(dim), samples};
  for (std::int64_t s = 0; s < samples; ++s) {
    ++c.counts[(offset + static_cast<int>(rng() % static_cast<std::uint64_t>(width))) % dim];
  }
  return c;
}

namespace {

constexpr int kClusterWidths[10] = {2, 4, 8, 16, 24, 32, 48, 64, 96, 128};
constexpr std::int64_t kClusterSamples = 4096;

}  // namespace

CountFeature ClusteredCorpus::query_for(int cluster, std::mt19937_64& rng) const {
  return band_counts(256, 23 * cluster, kClusterWidths[cluster], kClusterSamples, rng);
}

ClusteredCorpus clustered_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ClusteredCorpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 10);
    corpus.records.push_back(corpus.query_for(c, rng));
    corpus.cluster_of.push_back(c);
  }
  return corpus;
}

Eigen::Index mismatches(const LabelMap& a, const LabelMap& b) { return (a.labels != b.labels).count(); }

double two_class_agreement(const LabelMap& labels, const LabelMap& truth) {
  const auto n = static_cast<double>(truth.size());
  const auto same = static_cast<double>((labels.labels == truth.labels).count());
  const auto swapped = static_cast<double>((labels.labels == (1 - truth.labels)).count());
  return std::max(same, swapped) / n;
}

}  // namespace segkit::fixtures
