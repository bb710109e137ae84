#include "segkit/threshold.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "segkit/error.hpp"

namespace segkit {

namespace {

__extension__ using Wide = __int128;

struct ClassSums {
  std::int64_t n0 = 0, s0 = 0, n1 = 0, s1 = 0;
};

// Exact integer class sums make the score a deterministic function of the
// partition, so equal partitions give bit-equal scores.
double variance_from_sums(const ClassSums& c) {
  if (c.n0 == 0 || c.n1 == 0) return 0.0;
  const Wide cross = static_cast<Wide>(c.s0) * c.n1 - static_cast<Wide>(c.s1) * c.n0;
  const long double n0 = c.n0, n1 = c.n1, total = n0 + n1;
  const long double diff = static_cast<long double>(cross);
  // w0 w1 (mu0 - mu1)^2 == (s0 n1 - s1 n0)^2 / (n0 n1 N^2)
  return static_cast<double>(diff * diff / (n0 * n1) / (total * total));
}

std::vector<int> local_maxima(const SmoothHistogram& s) {
  std::vector<int> peaks;
  int b = 0;
  while (b < 256) {
    int e = b;
    while (e + 1 < 256 && s[e + 1] == s[b]) ++e;
    const bool left_lower = b == 0 || s[b - 1] < s[b];
    const bool right_lower = e == 255 || s[e + 1] < s[b];
    if (left_lower && right_lower && !(b == 0 && e == 255)) peaks.push_back(b);
    b = e + 1;
  }
  return peaks;
}

}  // namespace

Histogram gray_histogram(const GrayImage& image) {
  Histogram h;
  for (Eigen::Index i = 0; i < image.size(); ++i) ++h.counts[image.data()[i]];
  h.total = image.size();
  return h;
}

SmoothHistogram smooth_histogram(const SmoothHistogram& h, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::EvenWindow, "histogram window must be odd and positive, got " + std::to_string(window));
  }
  if (window == 1) return h;
  const int half = window / 2;
  SmoothHistogram out = SmoothHistogram::Zero();
  for (int b = 0; b < 256; ++b) {
    double acc = 0;
    for (int o = -half; o <= half; ++o) acc += h[std::clamp(b + o, 0, 255)];
    out[b] = acc / window;
  }
  return out;
}

SmoothHistogram smooth_histogram(const Histogram& h, int window) {
  return smooth_histogram(SmoothHistogram(h.counts.cast<double>()), window);
}

ThresholdReport valley_threshold(const Histogram& h, int smooth_window, int min_separation) {
  const SmoothHistogram s = smooth_histogram(h, smooth_window);
  auto peaks = local_maxima(s);
  std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) { return s[a] > s[b]; });

  for (std::size_t i = 0; i < peaks.size(); ++i) {
    for (std::size_t j = i + 1; j < peaks.size(); ++j) {
      const int lo = std::min(peaks[i], peaks[j]);
      const int hi = std::max(peaks[i], peaks[j]);
      if (hi - lo < std::max(min_separation, 2)) continue;
      int level = lo + 1;
      for (int b = lo + 2; b < hi; ++b) {
        if (s[b] < s[level]) level = b;
      }
      return {level, ThresholdMethod::Valley, std::make_pair(lo, hi)};
    }
  }
  throw Error(ErrorCode::NoTwoPeaks, "histogram has no two peaks at least " + std::to_string(min_separation) +
                                         " bins apart; valley thresholding is inapplicable");
}

double between_class_variance(const Histogram& h, int t) {
  ClassSums c;
  for (int b = 0; b < 256; ++b) {
    if (b <= t) {
      c.n0 += h.counts[b];
      c.s0 += h.counts[b] * b;
    } else {
      c.n1 += h.counts[b];
      c.s1 += h.counts[b] * b;
    }
  }
  return variance_from_sums(c);
}

ThresholdReport otsu_threshold(const Histogram& h) {
  if (h.total <= 0) throw Error(ErrorCode::EmptyHistogram, "Otsu threshold of an empty histogram");
  std::int64_t all_sum = 0;
  for (int b = 0; b < 256; ++b) all_sum += h.counts[b] * b;

  ClassSums c;
  int best = 0;
  double best_score = -1.0;
  for (int t = 0; t < 256; ++t) {
    c.n0 += h.counts[t];
    c.s0 += h.counts[t] * t;
    c.n1 = h.total - c.n0;
    c.s1 = all_sum - c.s0;
    const double score = variance_from_sums(c);
    if (score > best_score) {
      best_score = score;
      best = t;
    }
  }
  return {best, ThresholdMethod::Otsu, std::nullopt};
}

LabelMap binarize(const GrayImage& image, int level) {
  if (level < 0 || level > 255) throw Error(ErrorCode::InvalidArgument, "threshold level outside [0, 255]");
  LabelMap out;
  out.labels = (image.cast<int>() > level).cast<std::int32_t>();
  out.k = 2;
  out.complete = true;
  return out;
}

}  // namespace segkit
