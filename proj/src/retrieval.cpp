#include "segkit/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "segkit/error.hpp"

namespace segkit {

namespace {

// Slack on the pruning bound; intersection and 1 - L1/2 agree to ~1e-13,
// so anything beyond this margin scores strictly lower than the k-th best.
constexpr double kPruneMargin = 1e-9;

constexpr std::string_view kMagic = "SEGIDX";

bool ranks_before(const RankedResult& a, const RankedResult& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

void require_query(const Index& index, const FeatureVector& query, std::size_t top) {
  if (index.empty()) throw Error(ErrorCode::EmptyIndex, "index holds no records");
  if (query.dimension() != index.feature_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.dimension()) +
                                                  " bins, index has " + std::to_string(index.feature_dim()));
  }
  if (top < 1) throw Error(ErrorCode::InvalidArgument, "top must be at least 1");
}

RankedResult ranked(const ImageRecord& r, double score) { return {r.id, score, r.path, r.description}; }

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

FeatureVector Index::pivot() const {
  FeatureVector p;
  p.bins = Eigen::VectorXd::Constant(feature_dim_, 1.0 / feature_dim_);
  p.normalized = true;
  return p;
}

std::uint64_t Index::ingest(const AnyImage& image, std::string description, std::string path) {
  return ingest(global_counts(image), std::move(description), std::move(path));
}

std::uint64_t Index::ingest(CountFeature counts, std::string description, std::string path) {
  const auto dim = static_cast<int>(counts.counts.size());
  if (dim != kGrayBins && dim != kColorBins) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimension must be 256 or 64");
  }
  if (feature_dim_ != 0 && dim != feature_dim_) {
    throw Error(ErrorCode::DimensionMismatch, "cannot mix " + std::to_string(dim) + "-bin features into a " +
                                                  std::to_string(feature_dim_) + "-bin index");
  }
  if (counts.total <= 0 || (counts.counts.array() < 0).any() || counts.counts.sum() != counts.total) {
    throw Error(ErrorCode::InvalidArgument, "histogram counts must be nonnegative and sum to a positive total");
  }
  feature_dim_ = dim;

  ImageRecord r;
  r.id = records_.size();
  r.path = std::move(path);
  r.description = std::move(description);
  r.feature = counts.normalized();
  r.counts = std::move(counts);
  r.pivot_distance = l1_distance(r.feature, pivot());

  const auto pos = std::upper_bound(pivot_order_.begin(), pivot_order_.end(), r.pivot_distance,
                                    [&](double d, std::uint64_t id) { return d < records_[id].pivot_distance; });
  pivot_order_.insert(pos, r.id);
  records_.push_back(std::move(r));
  return records_.back().id;
}

bool operator==(const Index& a, const Index& b) {
  if (a.feature_dim_ != b.feature_dim_ || a.records_.size() != b.records_.size()) return false;
  for (std::size_t i = 0; i < a.records_.size(); ++i) {
    const auto& x = a.records_[i];
    const auto& y = b.records_[i];
    if (x.id != y.id || x.path != y.path || x.description != y.description || !(x.counts == y.counts) ||
        x.pivot_distance != y.pivot_distance || x.feature.bins != y.feature.bins) {
      return false;
    }
  }
  return a.pivot_order_ == b.pivot_order_;
}

double similarity(const FeatureVector& a, const FeatureVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimensions " + std::to_string(a.dimension()) + " and " +
                                                  std::to_string(b.dimension()));
  }
  double acc = 0;
  for (Eigen::Index i = 0; i < a.dimension(); ++i) acc += std::min(a.bins[i], b.bins[i]);
  return acc;
}

std::vector<RankedResult> search_exhaustive(const Index& index, const FeatureVector& query, std::size_t top) {
  require_query(index, query, top);
  std::vector<RankedResult> all;
  all.reserve(index.size());
  for (const auto& r : index.records()) all.push_back(ranked(r, similarity(query, r.feature)));
  std::sort(all.begin(), all.end(), ranks_before);
  all.resize(std::min(top, all.size()));
  return all;
}

OptimizedSearch search_optimized(const Index& index, const FeatureVector& query, std::size_t top) {
  require_query(index, query, top);
  const auto& records = index.records();
  const auto& order = index.pivot_order();
  const double dq = l1_distance(query, index.pivot());
  const auto bound = [&](std::uint64_t id) { return std::abs(records[id].pivot_distance - dq); };

  // Two cursors walking outward from dq in pivot-distance order.
  const auto split_at = std::lower_bound(order.begin(), order.end(), dq,
                                         [&](std::uint64_t id, double d) { return records[id].pivot_distance < d; });
  auto right = static_cast<std::ptrdiff_t>(split_at - order.begin());
  auto left = right - 1;
  const auto n = static_cast<std::ptrdiff_t>(order.size());

  OptimizedSearch out;
  std::vector<double> best_l1;  // parallel to out.results
  while (left >= 0 || right < n) {
    std::uint64_t id;
    if (right >= n || (left >= 0 && bound(order[static_cast<std::size_t>(left)]) <= bound(order[static_cast<std::size_t>(right)]))) {
      id = order[static_cast<std::size_t>(left--)];
    } else {
      id = order[static_cast<std::size_t>(right++)];
    }
    if (out.results.size() == top && bound(id) > best_l1.back() + kPruneMargin) break;

    const auto& r = records[id];
    ++out.candidates_examined;
    const RankedResult candidate = ranked(r, similarity(query, r.feature));
    const double l1 = l1_distance(query, r.feature);
    const auto pos = static_cast<std::size_t>(
        std::upper_bound(out.results.begin(), out.results.end(), candidate, ranks_before) - out.results.begin());
    if (pos >= top) continue;
    out.results.insert(out.results.begin() + static_cast<std::ptrdiff_t>(pos), candidate);
    best_l1.insert(best_l1.begin() + static_cast<std::ptrdiff_t>(pos), l1);
    if (out.results.size() > top) {
      out.results.pop_back();
      best_l1.pop_back();
    }
  }
  return out;
}

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\') {
      out += escaped[i];
      continue;
    }
    if (++i == escaped.size()) throw std::invalid_argument("dangling backslash");
    switch (escaped[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      default: throw std::invalid_argument(std::string("unknown escape \\") + escaped[i]);
    }
  }
  return out;
}

std::string encode_index(const Index& index) {
  std::string out = std::string(kMagic) + "\t" + std::to_string(Index::kFormatVersion) + "\t" +
                    std::to_string(index.feature_dim()) + "\n";
  for (const auto& r : index.records()) {
    out += std::to_string(r.id);
    out += '\t';
    out += std::to_string(r.counts.total);
    out += '\t';
    for (Eigen::Index b = 0; b < r.counts.counts.size(); ++b) {
      if (b > 0) out += ',';
      out += std::to_string(r.counts.counts[b]);
    }
    out += '\t';
    out += escape_field(r.path);
    out += '\t';
    out += escape_field(r.description);
    out += '\n';
  }
  return out;
}

Index decode_index(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::BadHeader, "line 1: missing header");

  const auto header = split(lines[0], '\t');
  int version = 0, dim = -1;
  if (header.size() != 3 || header[0] != kMagic || !parse_int(header[1], version) || !parse_int(header[2], dim)) {
    throw Error(ErrorCode::BadHeader, "line 1: expected SEGIDX<TAB>1<TAB><feature_dim>");
  }
  if (version != Index::kFormatVersion) {
    throw Error(ErrorCode::BadHeader, "line 1: unsupported version " + std::to_string(version));
  }
  if (dim != 0 && dim != kGrayBins && dim != kColorBins) {
    throw Error(ErrorCode::BadHeader, "line 1: feature_dim must be 256 or 64");
  }
  if (dim == 0 && lines.size() > 1) throw Error(ErrorCode::BadHeader, "line 1: feature_dim 0 with records present");

  Index index;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto where = "line " + std::to_string(ln + 1) + ": ";
    const auto fields = split(lines[ln], '\t');
    if (fields.size() != 5) throw Error(ErrorCode::BadRecord, where + "expected 5 tab-separated fields");
    std::uint64_t id = 0;
    if (!parse_int(fields[0], id) || id != ln - 1) {
      throw Error(ErrorCode::BadRecord, where + "record ids must run 0, 1, 2, ...");
    }
    CountFeature counts;
    if (!parse_int(fields[1], counts.total) || counts.total <= 0) {
      throw Error(ErrorCode::BadRecord, where + "bad total");
    }
    const auto bins = split(fields[2], ',');
    if (static_cast<int>(bins.size()) != dim) {
      throw Error(ErrorCode::BadRecord, where + "expected " + std::to_string(dim) + " counts");
    }
    counts.counts.resize(dim);
    for (int b = 0; b < dim; ++b) {
      if (!parse_int(bins[static_cast<std::size_t>(b)], counts.counts[b]) || counts.counts[b] < 0) {
        throw Error(ErrorCode::BadRecord, where + "bad count in bin " + std::to_string(b));
      }
    }
    if (counts.counts.sum() != counts.total) throw Error(ErrorCode::BadRecord, where + "counts do not sum to total");
    std::string path, description;
    try {
      path = unescape_field(fields[3]);
      description = unescape_field(fields[4]);
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorCode::BadRecord, where + e.what());
    }
    index.ingest(std::move(counts), std::move(description), std::move(path));
  }
  return index;
}

}  // namespace segkit
