#pragma once

#include <cstddef>
#include <vector>

// Fuzzy rulebase core: Gaussian memberships, softmin aggregation and the
// direct (argmax firing strength) decision rule.

namespace evfuzz {

using FeatureVector = std::vector<double>;

// One rule: "x_1 CLOSE TO centers[0] AND ... AND x_p CLOSE TO centers[p-1]
// then class is class_label". Closeness is a Gaussian membership with
// per-clause center and spread.
struct FuzzyRule {
    int class_label = 0;            // 1..c
    std::vector<double> centers;    // length p
    std::vector<double> spreads;    // length p, all > 0
};

struct Rulebase {
    std::vector<FuzzyRule> rules;
    int num_features = 0;
    int num_classes = 0;
    double q = -10.0;   // softmin exponent, must stay negative
    double k_w = 2.0;   // spread multiplier used at induction (metadata)

    // Throws std::invalid_argument if any structural invariant is broken:
    // at least one rule, consistent dimensions, positive spreads, labels in
    // 1..num_classes with every class represented, q < 0.
    void validate() const;
};

// Per-class confidence measures: max firing strength over the class's rules,
// with entries below the threshold flushed to zero.
using ConfidenceVector = std::vector<double>;

inline constexpr double kDefaultConfidenceThreshold = 0.01;

// exp(-(x - v)^2 / sigma^2). Note: no factor 2 in the denominator.
// Throws std::invalid_argument if sigma <= 0.
double gaussian_membership(double x, double v, double sigma);

// log of the above, clamped at -700 so later exponent-domain work stays
// finite. Same sigma check.
double log_gaussian_membership(double x, double v, double sigma);

// Soft-match aggregator SM(x, q) = ((x_1^q + ... + x_n^q) / n)^(1/q).
// Tends to min(x) as q -> -inf and max(x) as q -> +inf. Computed in the log
// domain so large |q| does not overflow. Throws on empty input, q == 0, or
// any non-positive value.
double soft_match(const std::vector<double>& values, double q);

// Firing strength of a rule on x: softmin of the per-clause memberships.
// Equals 1 exactly when x coincides with the rule center in every dimension.
double firing_strength(const FuzzyRule& rule, const FeatureVector& x, double q);

// log(firing_strength); the tuning gradients are assembled from this.
double log_firing_strength(const FuzzyRule& rule, const FeatureVector& x, double q);

// Per-class max firing strength, thresholded: entries < tau become 0.
ConfidenceVector confidence_vector(const Rulebase& rb, const FeatureVector& x,
                                   double tau = kDefaultConfidenceThreshold);

struct DirectDecision {
    int class_label = 0;
    std::size_t rule_index = 0;
    double firing = 0.0;
};

// Argmax of firing strength over all rules; ties go to the lowest rule index.
DirectDecision classify_direct(const Rulebase& rb, const FeatureVector& x);

}  // namespace evfuzz
