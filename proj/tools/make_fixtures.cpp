// Writes the synthetic test images to a directory so they can be inspected
// or fed to the command line tool.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fixtures.hpp"
#include "segkit/raster.hpp"

namespace fs = std::filesystem;

namespace {

void save(const fs::path& path, const segkit::AnyImage& image) {
  const auto bytes = segkit::encode_pnm(image);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? argv[1] : "fixtures";
  try {
    using namespace segkit;
    fs::create_directories(dir);
    save(dir / "ramp_edge.pgm", AnyImage(fixtures::ramp_edge_speckle()));
    save(dir / "ramp_edge_truth.pgm", AnyImage(render_labels(fixtures::ramp_edge_truth())));
    save(dir / "two_half_noisy.pgm", AnyImage(fixtures::noisy_two_half(64, 10.0, 1)));
    save(dir / "two_half_truth.pgm", AnyImage(render_labels(fixtures::two_half_truth(64, 64))));
    save(dir / "checkerboard.pgm", AnyImage(fixtures::checkerboard(16, 16)));
    save(dir / "exemplar_dark.pgm", AnyImage(GrayImage::Constant(9, 9, 10)));
    save(dir / "exemplar_light.pgm", AnyImage(GrayImage::Constant(9, 9, 200)));
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
