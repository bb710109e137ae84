#include <doctest.h>

#include <cstdlib>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "segkit/error.hpp"
#include "segkit/threshold.hpp"

using namespace segkit;

namespace {

Histogram bimodal_fixture() {
  Histogram h;
  for (int b = 0; b < 256; ++b) {
    h.counts[b] = 5 + std::max(0, 50 - std::abs(b - 60)) + std::max(0, 50 - std::abs(b - 190));
  }
  h.total = h.counts.sum();
  return h;
}

Histogram mirrored(const Histogram& h) {
  Histogram m;
  for (int b = 0; b < 256; ++b) m.counts[b] = h.counts[255 - b];
  m.total = h.total;
  return m;
}

ErrorCode error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("gray_histogram counts") {
  GrayImage img(2, 2);
  img << 0, 0, 255, 7;
  const Histogram h = gray_histogram(img);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[7] == 1);
  CHECK(h.counts[255] == 1);
  CHECK(h.total == 4);
  CHECK(h.counts.sum() == 4);

  const Histogram c = gray_histogram(GrayImage::Constant(3, 3, 5));
  CHECK(c.counts[5] == 9);
  CHECK(c.counts.sum() == 9);
}

TEST_CASE("smooth_histogram") {
  const Histogram h = bimodal_fixture();
  CHECK((smooth_histogram(h, 1) == h.counts.cast<double>()).all());

  Histogram delta;
  delta.counts[100] = 3;
  delta.total = 3;
  const SmoothHistogram s = smooth_histogram(delta, 3);
  CHECK(s[99] == 1.0);
  CHECK(s[100] == 1.0);
  CHECK(s[101] == 1.0);
  CHECK(s.sum() == 3.0);

  SUBCASE("mass is conserved away from the edges") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      Histogram r;
      for (int b = 8; b < 248; ++b) r.counts[b] = static_cast<std::int64_t>(rng() % 100);
      r.total = r.counts.sum();
      for (const int w : {3, 5, 9}) {
        CHECK(std::abs(smooth_histogram(r, w).sum() - static_cast<double>(r.total)) <= 256 * 1e-16 * r.total);
      }
    }
  }
  SUBCASE("edge bins are replicated") {
    Histogram flat;
    flat.counts.setConstant(10);
    CHECK((smooth_histogram(flat, 5) == 10.0).all());
  }
  CHECK(error_of([&] { smooth_histogram(h, 4); }) == ErrorCode::EvenWindow);
}

TEST_CASE("valley_threshold on the two-triangle histogram") {
  const Histogram h = bimodal_fixture();
  const auto report = valley_threshold(h, 1, 16);
  REQUIRE(report.peaks);
  CHECK(report.peaks->first == 60);
  CHECK(report.peaks->second == 190);
  CHECK(report.level == oracles::valley_scan(h.counts, 60, 190));
  CHECK(report.level == 110);
  CHECK(report.method == ThresholdMethod::Valley);

  const auto m = valley_threshold(mirrored(h), 1, 16);
  CHECK(m.peaks->first == 65);
  CHECK(m.peaks->second == 195);
  CHECK(m.level == oracles::valley_scan(mirrored(h).counts, 65, 195));
  CHECK(m.level == 255 - 140);
}

TEST_CASE("valley_threshold rejects unimodal histograms") {
  Histogram flat;
  flat.counts.setConstant(10);
  flat.total = 2560;
  CHECK(error_of([&] { valley_threshold(flat, 5, 16); }) == ErrorCode::NoTwoPeaks);

  Histogram single;
  single.counts[80] = 100;
  single.total = 100;
  CHECK(error_of([&] { valley_threshold(single, 5, 16); }) == ErrorCode::NoTwoPeaks);

  SUBCASE("peaks closer than min_separation do not count") {
    Histogram close;
    close.counts[100] = 50;
    close.counts[110] = 40;
    close.total = 90;
    CHECK(error_of([&] { valley_threshold(close, 1, 16); }) == ErrorCode::NoTwoPeaks);
    CHECK(valley_threshold(close, 1, 8).level == 101);
  }
}

TEST_CASE("valley level lies strictly between the peaks") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    Histogram h;
    for (int b = 0; b < 256; ++b) h.counts[b] = static_cast<std::int64_t>(rng() % 40);
    h.total = h.counts.sum();
    try {
      const auto r = valley_threshold(h, 5, 16);
      CHECK(r.peaks->first < r.level);
      CHECK(r.level < r.peaks->second);
      CHECK(r.peaks->second - r.peaks->first >= 16);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoTwoPeaks);
    }
  }
}

TEST_CASE("otsu_threshold") {
  Histogram two;
  two.counts[50] = 2;
  two.counts[200] = 2;
  two.total = 4;
  CHECK(otsu_threshold(two).level == 50);
  CHECK(between_class_variance(two, 50) == doctest::Approx(5625.0));
  CHECK(between_class_variance(two, 199) == between_class_variance(two, 50));

  Histogram single;
  single.counts[120] = 9;
  single.total = 9;
  CHECK(otsu_threshold(single).level == 0);

  CHECK(error_of([] { otsu_threshold(Histogram{}); }) == ErrorCode::EmptyHistogram);

  SUBCASE("matches the exact brute force") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
      Histogram h;
      std::array<std::int64_t, 256> raw{};
      const int support = 1 + static_cast<int>(rng() % 256);
      for (int b = 0; b < 256; ++b) {
        raw[static_cast<std::size_t>(b)] = (static_cast<int>(rng() % 256) < support) ? static_cast<std::int64_t>(rng() % 1000) : 0;
        h.counts[b] = raw[static_cast<std::size_t>(b)];
      }
      h.total = h.counts.sum();
      if (h.total == 0) continue;
      CHECK(otsu_threshold(h).level == oracles::otsu_brute_force(raw));
    }
  }
}

TEST_CASE("binarize") {
  GrayImage img(2, 2);
  img << 0, 0, 255, 7;
  const LabelMap m = binarize(img, 7);
  CHECK(m.k == 2);
  CHECK(m.complete);
  CHECK(m[0] == 0);
  CHECK(m[1] == 0);
  CHECK(m[2] == 1);
  CHECK(m[3] == 0);
  CHECK((binarize(img, 255).labels == 0).all());

  const GrayImage bright = GrayImage::Constant(3, 2, 4);
  CHECK((binarize(bright, 0).labels == 1).all());
  CHECK(binarize(img, 100).is_valid());
}
