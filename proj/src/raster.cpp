#include "segkit/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <string>

#include "segkit/error.hpp"

namespace segkit {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // PNM header whitespace may contain '#' comments running to end of line.
  void skip_whitespace() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_number(const char* field) {
    skip_whitespace();
    if (pos_ >= bytes_.size()) throw Error(ErrorCode::TruncatedData, std::string("missing ") + field);
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw Error(ErrorCode::BadHeader, std::string(field) + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::BadHeader, std::string("non-numeric ") + field);
    return value;
  }

  void expect_single_whitespace() {
    if (pos_ >= bytes_.size()) throw Error(ErrorCode::TruncatedData, "missing header terminator");
    if (!std::isspace(bytes_[pos_])) throw Error(ErrorCode::BadHeader, "maxval not followed by whitespace");
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> header_bytes(const char* magic, Eigen::Index width, Eigen::Index height) {
  const std::string header =
      std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  return {header.begin(), header.end()};
}

}  // namespace

bool LabelMap::is_valid() const {
  if (k < 1) return false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const auto l = labels.data()[i];
    if (l >= k) return false;
    if (l < 0 && (complete || l != kUnlabeled)) return false;
  }
  return true;
}

AnyImage decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::BadMagic, "expected P5 or P6");
  }
  const bool color = bytes[1] == '6';
  HeaderReader reader(bytes.subspan(2));
  const long width = reader.read_number("width");
  const long height = reader.read_number("height");
  const long maxval = reader.read_number("maxval");
  if (width < 1 || height < 1) throw Error(ErrorCode::BadHeader, "image dimensions must be positive");
  if (maxval != 255) throw Error(ErrorCode::UnsupportedMaxval, "maxval " + std::to_string(maxval));
  reader.expect_single_whitespace();

  const std::size_t offset = 2 + reader.position();
  const std::size_t channels = color ? 3 : 1;
  const std::size_t needed = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  if (bytes.size() - offset < needed) {
    throw Error(ErrorCode::TruncatedData,
                "expected " + std::to_string(needed) + " sample bytes, got " + std::to_string(bytes.size() - offset));
  }
  const auto samples = bytes.subspan(offset, needed);

  if (color) {
    RgbImage image(width, height);
    std::copy(samples.begin(), samples.end(), image.pixels.data());
    return image;
  }
  GrayImage image(height, width);
  std::copy(samples.begin(), samples.end(), image.data());
  return image;
}

std::vector<std::uint8_t> encode_pnm(const GrayImage& image) {
  auto out = header_bytes("P5", image.cols(), image.rows());
  out.insert(out.end(), image.data(), image.data() + image.size());
  return out;
}

std::vector<std::uint8_t> encode_pnm(const RgbImage& image) {
  auto out = header_bytes("P6", image.width, image.height);
  out.insert(out.end(), image.pixels.data(), image.pixels.data() + image.pixels.size());
  return out;
}

std::vector<std::uint8_t> encode_pnm(const AnyImage& image) {
  return std::visit([](const auto& img) { return encode_pnm(img); }, image);
}

GrayImage to_gray(const RgbImage& image) {
  GrayImage gray(image.height, image.width);
  for (Eigen::Index i = 0; i < image.pixels.rows(); ++i) {
    const double luma = 0.299 * image.pixels(i, 0) + 0.587 * image.pixels(i, 1) + 0.114 * image.pixels(i, 2);
    gray.data()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
  }
  return gray;
}

GrayImage to_gray(const AnyImage& image) {
  if (const auto* gray = std::get_if<GrayImage>(&image)) return *gray;
  return to_gray(std::get<RgbImage>(image));
}

GrayImage box_smooth(const GrayImage& image, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "smoothing radius must be nonnegative");
  if (radius == 0) return image;
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  const long count = static_cast<long>(2 * radius + 1) * (2 * radius + 1);
  GrayImage out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      long sum = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const auto yy = std::clamp<Eigen::Index>(y + dy, 0, rows - 1);
        for (int dx = -radius; dx <= radius; ++dx) {
          sum += image(yy, std::clamp<Eigen::Index>(x + dx, 0, cols - 1));
        }
      }
      out(y, x) = static_cast<std::uint8_t>((sum + count / 2) / count);
    }
  }
  return out;
}

GradientMap sobel_magnitude(const GrayImage& image) {
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  auto at = [&](Eigen::Index y, Eigen::Index x) -> int {
    return image(std::clamp<Eigen::Index>(y, 0, rows - 1), std::clamp<Eigen::Index>(x, 0, cols - 1));
  };
  GradientMap out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      const int gx = (at(y - 1, x + 1) + 2 * at(y, x + 1) + at(y + 1, x + 1)) -
                     (at(y - 1, x - 1) + 2 * at(y, x - 1) + at(y + 1, x - 1));
      const int gy = (at(y + 1, x - 1) + 2 * at(y + 1, x) + at(y + 1, x + 1)) -
                     (at(y - 1, x - 1) + 2 * at(y - 1, x) + at(y - 1, x + 1));
      out(y, x) = std::abs(gx) + std::abs(gy);
    }
  }
  return out;
}

GrayImage render_labels(const LabelMap& labels) {
  if (!labels.complete) throw Error(ErrorCode::IncompleteLabels, "cannot render a partial label map");
  if (labels.k < 1 || labels.k > 256) {
    throw Error(ErrorCode::InvalidArgument, "label count " + std::to_string(labels.k) + " outside [1, 256]");
  }
  const int step = 255 / std::max(labels.k - 1, 1);
  return (labels.labels * step).cast<std::uint8_t>();
}

}  // namespace segkit
