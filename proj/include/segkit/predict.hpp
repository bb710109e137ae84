#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "segkit/region.hpp"

namespace segkit {

/// Piecewise-linear membership: 0 outside [a, d], 1 on [b, c].
struct Trapezoid {
  double a = 0, b = 0, c = 0, d = 0;

  friend bool operator==(const Trapezoid&, const Trapezoid&) = default;
};

struct Antecedent {
  std::string feature;
  Trapezoid shape;

  friend bool operator==(const Antecedent&, const Antecedent&) = default;
};

struct FuzzyRule {
  std::string label;
  std::vector<Antecedent> antecedents;

  friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

struct RuleBase {
  std::vector<FuzzyRule> rules;

  friend bool operator==(const RuleBase&, const RuleBase&) = default;
};

using FeatureMap = std::map<std::string, double, std::less<>>;

struct Prediction {
  std::string label;
  double confidence = 0;
  std::vector<double> activations;
};

double trapezoid_membership(double value, const Trapezoid& t);

/// Min-conjunction of the antecedent memberships. Throws MissingFeature.
double rule_activation(const FuzzyRule& rule, const FeatureMap& features);

/// Label of the most activated rule; ties go to the earliest rule. A
/// confidence of 0 means no rule matched.
Prediction predict_label(const RuleBase& rulebase, const FeatureMap& features);

/// Line grammar:
///   RULE <label> : <name> IN (a,b,c,d) [AND <name> IN (a,b,c,d)]...
/// '#' starts a comment, blank lines are skipped.
RuleBase parse_rulebase(std::string_view text);

/// Canonical single-space rendering; parse_rulebase reads it back unchanged.
std::string serialize_rulebase(const RuleBase& rulebase);

/// `mean`, `variance`, `size_fraction`, `boundary_fraction` of the largest
/// region (lowest label on ties) plus `region_count`.
FeatureMap image_features(const std::vector<RegionStats>& stats);

}  // namespace segkit
