#include "evfuzz/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evfuzz {

namespace {

constexpr double kLogMembershipFloor = -700.0;  // keeps exp() finite

// log((sum_i exp(args_i)) / n) via the usual max-shift.
double log_mean_exp(const std::vector<double>& args) {
    const double m = *std::max_element(args.begin(), args.end());
    double sum = 0.0;
    for (double a : args) sum += std::exp(a - m);
    return m + std::log(sum / static_cast<double>(args.size()));
}

}  // namespace

void Rulebase::validate() const {
    if (rules.empty()) throw std::invalid_argument("rulebase has no rules");
    if (num_features < 1) throw std::invalid_argument("rulebase num_features must be >= 1");
    if (num_classes < 1) throw std::invalid_argument("rulebase num_classes must be >= 1");
    if (!(q < 0.0)) throw std::invalid_argument("softmin exponent q must be negative");
    std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const FuzzyRule& r = rules[i];
        if (r.class_label < 1 || r.class_label > num_classes)
            throw std::invalid_argument("rule " + std::to_string(i) + " has class label out of range");
        if (r.centers.size() != static_cast<std::size_t>(num_features) ||
            r.spreads.size() != static_cast<std::size_t>(num_features))
            throw std::invalid_argument("rule " + std::to_string(i) + " has wrong dimension");
        for (double s : r.spreads)
            if (!(s > 0.0))
                throw std::invalid_argument("rule " + std::to_string(i) + " has non-positive spread");
        seen[static_cast<std::size_t>(r.class_label - 1)] = true;
    }
    for (int k = 0; k < num_classes; ++k)
        if (!seen[static_cast<std::size_t>(k)])
            throw std::invalid_argument("class " + std::to_string(k + 1) + " has no rule");
}

double gaussian_membership(double x, double v, double sigma) {
    return std::exp(log_gaussian_membership(x, v, sigma));
}

double log_gaussian_membership(double x, double v, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("membership spread must be positive");
    const double d = (x - v) / sigma;
    return std::max(-d * d, kLogMembershipFloor);
}

double soft_match(const std::vector<double>& values, double q) {
    if (values.empty()) throw std::invalid_argument("soft_match of empty sequence");
    if (q == 0.0) throw std::invalid_argument("soft_match exponent q must be nonzero");
    std::vector<double> scaled;
    scaled.reserve(values.size());
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("soft_match requires positive values");
        scaled.push_back(q * std::log(v));
    }
    return std::exp(log_mean_exp(scaled) / q);
}

double firing_strength(const FuzzyRule& rule, const FeatureVector& x, double q) {
    return std::exp(log_firing_strength(rule, x, q));
}

double log_firing_strength(const FuzzyRule& rule, const FeatureVector& x, double q) {
    if (x.size() != rule.centers.size() || rule.centers.size() != rule.spreads.size())
        throw std::invalid_argument("feature vector does not match rule dimension");
    if (x.empty()) throw std::invalid_argument("empty feature vector");
    std::vector<double> scaled(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        scaled[j] = q * log_gaussian_membership(x[j], rule.centers[j], rule.spreads[j]);
    return log_mean_exp(scaled) / q;
}

ConfidenceVector confidence_vector(const Rulebase& rb, const FeatureVector& x, double tau) {
    ConfidenceVector cm(static_cast<std::size_t>(rb.num_classes), 0.0);
    for (const FuzzyRule& r : rb.rules) {
        const double alpha = firing_strength(r, x, rb.q);
        double& slot = cm[static_cast<std::size_t>(r.class_label - 1)];
        slot = std::max(slot, alpha);
    }
    for (double& v : cm)
        if (v < tau) v = 0.0;
    return cm;
}

DirectDecision classify_direct(const Rulebase& rb, const FeatureVector& x) {
    if (rb.rules.empty()) throw std::invalid_argument("rulebase has no rules");
    DirectDecision best{rb.rules[0].class_label, 0, firing_strength(rb.rules[0], x, rb.q)};
    for (std::size_t i = 1; i < rb.rules.size(); ++i) {
        const double alpha = firing_strength(rb.rules[i], x, rb.q);
        if (alpha > best.firing) best = DirectDecision{rb.rules[i].class_label, i, alpha};
    }
    return best;
}

}  // namespace evfuzz
