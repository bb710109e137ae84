#include "segkit/predict.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "segkit/error.hpp"

namespace segkit {

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(ErrorCode code, const std::string& msg) const {
    throw Error(code, "line " + std::to_string(line_no_) + ": " + msg);
  }

  void skip_spaces() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r')) ++pos_;
  }

  bool at_end() {
    skip_spaces();
    return pos_ >= line_.size();
  }

  std::string_view word() {
    skip_spaces();
    const auto start = pos_;
    while (pos_ < line_.size() && !is_delimiter(line_[pos_])) ++pos_;
    if (start == pos_) fail(ErrorCode::SyntaxError, "expected a word at column " + std::to_string(start + 1));
    return line_.substr(start, pos_ - start);
  }

  void keyword(std::string_view kw) {
    const auto w = word();
    if (w != kw) fail(ErrorCode::SyntaxError, "expected '" + std::string(kw) + "', found '" + std::string(w) + "'");
  }

  void punct(char c) {
    skip_spaces();
    if (pos_ >= line_.size() || line_[pos_] != c) fail(ErrorCode::SyntaxError, std::string("expected '") + c + "'");
    ++pos_;
  }

  double number() {
    skip_spaces();
    double value = 0;
    const char* begin = line_.data() + pos_;
    const char* end = line_.data() + line_.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || !std::isfinite(value)) fail(ErrorCode::SyntaxError, "expected a decimal number");
    pos_ = static_cast<std::size_t>(ptr - line_.data());
    return value;
  }

 private:
  static bool is_delimiter(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == ':' || c == '(' || c == ')' || c == ',';
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

double trapezoid_membership(double value, const Trapezoid& t) {
  if (value < t.a || value > t.d) return 0.0;
  if (value >= t.b && value <= t.c) return 1.0;
  if (value < t.b) return (value - t.a) / (t.b - t.a);  // a < value < b, so b > a
  return (t.d - value) / (t.d - t.c);                   // c < value <= d, so d > c
}

double rule_activation(const FuzzyRule& rule, const FeatureMap& features) {
  double degree = 1.0;
  for (const auto& ante : rule.antecedents) {
    const auto it = features.find(ante.feature);
    if (it == features.end()) {
      throw Error(ErrorCode::MissingFeature, "rule '" + rule.label + "' needs feature '" + ante.feature + "'");
    }
    degree = std::min(degree, trapezoid_membership(it->second, ante.shape));
  }
  return degree;
}

Prediction predict_label(const RuleBase& rulebase, const FeatureMap& features) {
  if (rulebase.rules.empty()) throw Error(ErrorCode::EmptyRuleBase, "rule base holds no rules");
  Prediction p;
  std::size_t best = 0;
  for (std::size_t i = 0; i < rulebase.rules.size(); ++i) {
    p.activations.push_back(rule_activation(rulebase.rules[i], features));
    if (p.activations[i] > p.activations[best]) best = i;
  }
  p.label = rulebase.rules[best].label;
  p.confidence = p.activations[best];
  return p;
}

RuleBase parse_rulebase(std::string_view text) {
  RuleBase rb;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    LineParser p(line, line_no);
    if (p.at_end()) continue;
    p.keyword("RULE");
    FuzzyRule rule;
    rule.label = std::string(p.word());
    p.punct(':');
    std::set<std::string, std::less<>> seen;
    do {
      Antecedent ante;
      ante.feature = std::string(p.word());
      p.keyword("IN");
      p.punct('(');
      ante.shape.a = p.number();
      p.punct(',');
      ante.shape.b = p.number();
      p.punct(',');
      ante.shape.c = p.number();
      p.punct(',');
      ante.shape.d = p.number();
      p.punct(')');
      const auto& t = ante.shape;
      if (!(t.a <= t.b && t.b <= t.c && t.c <= t.d)) p.fail(ErrorCode::BadKnots, "knots must satisfy a <= b <= c <= d");
      if (!seen.insert(ante.feature).second) {
        p.fail(ErrorCode::DuplicateFeatureInRule, "feature '" + ante.feature + "' repeated in one rule");
      }
      rule.antecedents.push_back(std::move(ante));
      if (p.at_end()) break;
      p.keyword("AND");
    } while (true);
    rb.rules.push_back(std::move(rule));
  }
  if (rb.rules.empty()) throw Error(ErrorCode::EmptyRuleBase, "rule base holds no rules");
  return rb;
}

std::string serialize_rulebase(const RuleBase& rulebase) {
  std::string out;
  for (const auto& rule : rulebase.rules) {
    out += "RULE " + rule.label + " :";
    for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
      const auto& a = rule.antecedents[i];
      if (i > 0) out += " AND";
      out += " " + a.feature + " IN (" + format_number(a.shape.a) + "," + format_number(a.shape.b) + "," +
             format_number(a.shape.c) + "," + format_number(a.shape.d) + ")";
    }
    out += "\n";
  }
  return out;
}

FeatureMap image_features(const std::vector<RegionStats>& stats) {
  if (stats.empty()) throw Error(ErrorCode::InvalidArgument, "no regions to describe");
  const auto largest = std::max_element(stats.begin(), stats.end(), [](const RegionStats& a, const RegionStats& b) {
    return a.size < b.size;
  });
  return {
      {"mean", largest->mean},
      {"variance", largest->variance},
      {"size_fraction", largest->size_fraction},
      {"boundary_fraction", largest->boundary_fraction},
      {"region_count", static_cast<double>(stats.size())},
  };
}

}  // namespace segkit
