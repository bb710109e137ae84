#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace segkit {

/// Row-major 2-D raster: rows are image lines, columns are x positions.
template <typename T>
using Plane = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GrayImage = Plane<std::uint8_t>;
using GradientMap = Plane<double>;

/// Interleaved RGB raster; row i of `pixels` is the pixel at raster index i.
struct RgbImage {
  using Pixels = Eigen::Array<std::uint8_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

  Eigen::Index width = 0;
  Eigen::Index height = 0;
  Pixels pixels;

  RgbImage() = default;
  RgbImage(Eigen::Index w, Eigen::Index h) : width(w), height(h), pixels(w * h, 3) {
    pixels.setZero();
  }

  friend bool operator==(const RgbImage& a, const RgbImage& b) {
    return a.width == b.width && a.height == b.height && (a.pixels == b.pixels).all();
  }
};

using AnyImage = std::variant<GrayImage, RgbImage>;

inline constexpr std::int32_t kUnlabeled = -1;

/// Per-pixel segmentation labels. A complete map carries a label in [0, k)
/// on every pixel; a partial map may also hold kUnlabeled.
struct LabelMap {
  Plane<std::int32_t> labels;
  std::int32_t k = 0;
  bool complete = true;

  Eigen::Index width() const { return labels.cols(); }
  Eigen::Index height() const { return labels.rows(); }
  Eigen::Index size() const { return labels.size(); }
  std::int32_t operator[](Eigen::Index i) const { return labels.data()[i]; }

  /// Checks the label range invariants, including completeness when flagged.
  bool is_valid() const;
};

AnyImage decode_pnm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_pnm(const GrayImage& image);
std::vector<std::uint8_t> encode_pnm(const RgbImage& image);
std::vector<std::uint8_t> encode_pnm(const AnyImage& image);

GrayImage to_gray(const RgbImage& image);
GrayImage to_gray(const AnyImage& image);

/// Mean filter over a (2r+1)^2 window with edge replication, rounded half up.
GrayImage box_smooth(const GrayImage& image, int radius);

/// |Gx| + |Gy| with 3x3 Sobel kernels and edge replication.
GradientMap sobel_magnitude(const GrayImage& image);

/// Renders label l of a k-label map as gray l * floor(255 / max(k - 1, 1)).
/// Throws InvalidArgument for k > 256 or a partial map.
GrayImage render_labels(const LabelMap& labels);

}  // namespace segkit
