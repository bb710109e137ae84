#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "segkit/clustering.hpp"
#include "segkit/error.hpp"
#include "segkit/features.hpp"
#include "segkit/predict.hpp"
#include "segkit/raster.hpp"
#include "segkit/region.hpp"
#include "segkit/retrieval.hpp"
#include "segkit/threshold.hpp"

namespace segkit::cli {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return bytes;
}

std::string read_text(const std::string& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

AnyImage read_image(const std::string& path) { return decode_pnm(read_bytes(path)); }

// Writes to a sibling temp file and renames it over the destination.
void write_atomic(const std::string& path, std::string_view data) {
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + temp.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(temp, ec);
      throw IoError("error writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

void write_image(const std::string& path, const GrayImage& image) {
  const auto bytes = encode_pnm(image);
  write_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct ClusterOptions {
  int k = 0;
  double beta = kDefaultEdgeBeta;
  std::uint64_t seed = 0;
  std::string init = "quantile";
  int max_iter = 100;
  double epsilon = 1e-4;

  ClusteringConfig config() const {
    ClusteringConfig c;
    c.k = k;
    c.seed = seed;
    c.init = init == "random" ? InitStrategy::SeededRandom : InitStrategy::Quantile;
    c.max_iter = max_iter;
    c.epsilon = epsilon;
    return c;
  }
};

struct WindowOptions {
  std::vector<std::string> exemplars;
  int window = kDefaultFeatureWindow;
  int iterations = 5;
};

void add_cluster_flags(CLI::App* cmd, ClusterOptions& o) {
  cmd->add_option("--k", o.k, "Number of clusters");
  cmd->add_option("--beta", o.beta, "Edge weight strength (edge method)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", o.seed, "Seed for --init random");
  cmd->add_option("--init", o.init, "Center initialization")->check(CLI::IsMember({"quantile", "random"}));
  cmd->add_option("--max-iter", o.max_iter, "Iteration cap");
  cmd->add_option("--epsilon", o.epsilon, "Convergence tolerance on center movement");
}

void add_region_flags(CLI::App* cmd, RegionParams& p) {
  cmd->add_option("--smooth-radius", p.smooth_radius, "Box smoothing radius");
  cmd->add_option("--variance-threshold", p.variance_threshold, "Seed 3x3 variance limit");
  cmd->add_option("--min-seed-size", p.min_seed_size, "Smallest seed component");
  cmd->add_option("--min-region-size", p.min_region_size, "Regions below this size are merged");
  cmd->add_option("--contrast-guard", p.contrast_guard, "Mean difference that protects small regions");
}

void add_window_flags(CLI::App* cmd, WindowOptions& w) {
  cmd->add_option("--exemplar", w.exemplars, "LABEL:FILE.pgm exemplar patch (windows method)");
  cmd->add_option("--window", w.window, "Local histogram window (odd)");
  cmd->add_option("--iterations", w.iterations, "Boundary refinement rounds");
}

std::vector<Exemplar> load_exemplars(const std::vector<std::string>& entries) {
  std::vector<Exemplar> out;
  for (const auto& entry : entries) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos || colon == 0) {
      throw Error(ErrorCode::InvalidArgument, "exemplar '" + entry + "' must look like LABEL:FILE");
    }
    int label = 0;
    try {
      std::size_t used = 0;
      label = std::stoi(entry.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "exemplar label in '" + entry + "' is not an integer");
    }
    out.push_back({label, global_feature(AnyImage(to_gray(read_image(entry.substr(colon + 1)))))});
  }
  return out;
}

struct Segmented {
  LabelMap labels;
  std::string summary;
};

Segmented segment_image(const GrayImage& image, const std::string& method, const ClusterOptions& cluster,
                        const RegionParams& region, const WindowOptions& windows) {
  if (method == "kmeans" || method == "edge") {
    std::optional<double> beta;
    if (method == "edge") beta = cluster.beta;
    auto seg = segment_clustering(image, cluster.config(), beta);
    return {std::move(seg.labels), "sse\t" + fixed6(seg.sse) + "\niterations\t" +
                                       std::to_string(seg.clustering.iterations) + "\n"};
  }
  if (method == "region") {
    auto seg = primary_segment(image, region);
    return {std::move(seg.labels), "regions\t" + std::to_string(seg.stats.size()) + "\n"};
  }
  auto labels = classify_windows(image, load_exemplars(windows.exemplars), windows.window);
  labels = refine_boundaries(labels, image, windows.window, windows.iterations);
  const auto summary = "classes\t" + std::to_string(labels.k) + "\n";
  return {std::move(labels), summary};
}

void require_k(const std::string& method, const ClusterOptions& cluster) {
  if ((method == "kmeans" || method == "edge") && cluster.k < 1) {
    throw CLI::ValidationError("--k", "method " + method + " requires --k >= 1");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Batch image segmentation, retrieval and prediction"};
  app.name("segkit");
  app.require_subcommand(1);

  std::string input, output, index_path, description, rules_path;
  std::string method;

  auto* threshold_cmd = app.add_subcommand("threshold", "Binarize a gray image at a histogram threshold");
  int hist_window = kDefaultSmoothWindow;
  int min_sep = kDefaultMinSeparation;
  threshold_cmd->add_option("--method", method, "otsu or valley")->required()->check(CLI::IsMember({"otsu", "valley"}));
  threshold_cmd->add_option("--window", hist_window, "Histogram smoothing window (valley)");
  threshold_cmd->add_option("--min-sep", min_sep, "Minimum peak separation in bins (valley)");
  threshold_cmd->add_option("IN", input)->required();
  threshold_cmd->add_option("OUT", output)->required();

  ClusterOptions cluster;
  RegionParams region;
  WindowOptions windows;

  auto* segment_cmd = app.add_subcommand("segment", "Segment an image and export the label map as PGM");
  segment_cmd->add_option("--method", method, "kmeans, edge, region or windows")
      ->required()
      ->check(CLI::IsMember({"kmeans", "edge", "region", "windows"}));
  add_cluster_flags(segment_cmd, cluster);
  add_region_flags(segment_cmd, region);
  add_window_flags(segment_cmd, windows);
  segment_cmd->add_option("IN", input)->required();
  segment_cmd->add_option("OUT", output)->required();

  auto* ingest_cmd = app.add_subcommand("ingest", "Add an image and its description to an index file");
  ingest_cmd->add_option("--index", index_path, "Index file (created if missing)")->required();
  ingest_cmd->add_option("--desc", description, "Short text description")->required();
  ingest_cmd->add_option("IN", input)->required();

  auto* query_cmd = app.add_subcommand("query", "Rank indexed images by similarity to an image");
  std::size_t top = 0;
  bool exhaustive = false;
  query_cmd->add_option("--index", index_path, "Index file")->required();
  query_cmd->add_option("--top", top, "Number of results")->required()->check(CLI::PositiveNumber);
  query_cmd->add_flag("--exhaustive", exhaustive, "Score every record instead of pruning");
  query_cmd->add_option("IN", input)->required();

  auto* predict_cmd = app.add_subcommand("predict", "Label an image with a fuzzy rule base");
  std::string predict_method = "region";
  predict_cmd->add_option("--rules", rules_path, "Rule base file")->required();
  predict_cmd->add_option("--segment-method", predict_method, "kmeans, edge, region or windows")
      ->check(CLI::IsMember({"kmeans", "edge", "region", "windows"}));
  add_cluster_flags(predict_cmd, cluster);
  add_region_flags(predict_cmd, region);
  add_window_flags(predict_cmd, windows);
  predict_cmd->add_option("IN", input)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (segment_cmd->parsed()) require_k(method, cluster);
    if (predict_cmd->parsed()) require_k(predict_method, cluster);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "segkit: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (threshold_cmd->parsed()) {
      const GrayImage image = to_gray(read_image(input));
      const Histogram h = gray_histogram(image);
      const auto report = method == "otsu" ? otsu_threshold(h) : valley_threshold(h, hist_window, min_sep);
      write_image(output, render_labels(binarize(image, report.level)));
      out << "threshold\t" << report.level << "\n";
    } else if (segment_cmd->parsed()) {
      const GrayImage image = to_gray(read_image(input));
      auto seg = segment_image(image, method, cluster, region, windows);
      const GrayImage rendered = render_labels(seg.labels);
      write_image(output, rendered);
      out << seg.summary;
    } else if (ingest_cmd->parsed()) {
      const AnyImage image = read_image(input);
      Index index;
      if (fs::exists(index_path)) index = decode_index(read_text(index_path));
      const auto id = index.ingest(image, description, input);
      write_atomic(index_path, encode_index(index));
      out << id << "\n";
    } else if (query_cmd->parsed()) {
      const Index index = decode_index(read_text(index_path));
      const FeatureVector query = global_feature(read_image(input));
      const auto results =
          exhaustive ? search_exhaustive(index, query, top) : search_optimized(index, query, top).results;
      std::ostringstream rows;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        rows << (i + 1) << '\t' << r.id << '\t' << fixed6(r.score) << '\t' << escape_field(r.path) << '\t'
             << escape_field(r.description) << '\n';
      }
      out << rows.str();
    } else if (predict_cmd->parsed()) {
      const RuleBase rules = parse_rulebase(read_text(rules_path));
      const GrayImage image = to_gray(read_image(input));
      const auto seg = segment_image(image, predict_method, cluster, region, windows);
      const auto prediction = predict_label(rules, image_features(region_stats(seg.labels, image)));
      out << prediction.label << '\t' << fixed6(prediction.confidence) << '\n';
    }
  } catch (const IoError& e) {
    err << "segkit: " << e.what() << "\n";
    return kIoOrFormat;
  } catch (const Error& e) {
    err << "segkit: " << e.what() << "\n";
    return is_format_error(e.code()) ? kIoOrFormat : kPrecondition;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "segkit: " << e.what() << "\n";
    return kIoOrFormat;
  }
  return kSuccess;
}

}  // namespace segkit::cli
