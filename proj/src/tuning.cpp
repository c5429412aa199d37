#include "evfuzz/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace evfuzz {

namespace {

// Partials of one rule's firing strength with respect to its own centers and
// spreads, computed in the log domain. With A = (1/p) sum_j mu_j^q and
// alpha = A^(1/q):
//   d alpha / d mu_j   = (1/p) * alpha^(1-q) * mu_j^(q-1)
//   d mu_j  / d v_j    = mu_j * 2 (x_j - v_j) / sigma_j^2
//   d mu_j  / d sigma_j = mu_j * 2 (x_j - v_j)^2 / sigma_j^3
// so with g_j = exp((1-q) log alpha + q log mu_j):
//   d alpha / d v_j     = (2/p) g_j (x_j - v_j) / sigma_j^2
//   d alpha / d sigma_j = (2/p) g_j (x_j - v_j)^2 / sigma_j^3
void firing_partials(const FuzzyRule& rule, const FeatureVector& x, double q,
                     std::vector<double>& d_center, std::vector<double>& d_spread) {
    const std::size_t p = x.size();
    const double log_alpha = log_firing_strength(rule, x, q);
    d_center.assign(p, 0.0);
    d_spread.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const double log_mu = log_gaussian_membership(x[j], rule.centers[j], rule.spreads[j]);
        const double g = std::exp((1.0 - q) * log_alpha + q * log_mu);
        const double diff = x[j] - rule.centers[j];
        const double sigma = rule.spreads[j];
        d_center[j] = 2.0 / static_cast<double>(p) * g * diff / (sigma * sigma);
        d_spread[j] = 2.0 / static_cast<double>(p) * g * diff * diff / (sigma * sigma * sigma);
    }
}

}  // namespace

RivalSelection select_rivals(const Rulebase& rb, const FeatureVector& x, int true_class) {
    if (true_class < 1 || true_class > rb.num_classes)
        throw std::invalid_argument("true class " + std::to_string(true_class) + " out of range");
    bool have_winner = false;
    bool have_rival = false;
    RivalSelection sel;
    for (std::size_t i = 0; i < rb.rules.size(); ++i) {
        const double alpha = firing_strength(rb.rules[i], x, rb.q);
        if (rb.rules[i].class_label == true_class) {
            if (!have_winner || alpha > sel.winner_firing) {
                sel.winner_index = i;
                sel.winner_firing = alpha;
                have_winner = true;
            }
        } else {
            if (!have_rival || alpha > sel.rival_firing) {
                sel.rival_index = i;
                sel.rival_firing = alpha;
                have_rival = true;
            }
        }
    }
    if (!have_winner)
        throw std::invalid_argument("no rule of class " + std::to_string(true_class));
    if (!have_rival)
        throw std::invalid_argument("rulebase has rules of only one class; no rival available");
    return sel;
}

double error_E(const Rulebase& rb, const std::vector<LabeledSample>& data) {
    double e = 0.0;
    for (const LabeledSample& s : data) {
        const RivalSelection sel = select_rivals(rb, s.features, s.label);
        const double term = 1.0 - sel.winner_firing + sel.rival_firing;
        e += term * term;
    }
    return e;
}

SampleGradient per_sample_gradient(const Rulebase& rb, const LabeledSample& sample,
                                   std::size_t winner_index, std::size_t rival_index) {
    if (winner_index >= rb.rules.size() || rival_index >= rb.rules.size())
        throw std::invalid_argument("rule index out of range");
    const FuzzyRule& winner = rb.rules[winner_index];
    const FuzzyRule& rival = rb.rules[rival_index];
    const double alpha_c = firing_strength(winner, sample.features, rb.q);
    const double alpha_r = firing_strength(rival, sample.features, rb.q);

    SampleGradient g;
    g.term = 1.0 - alpha_c + alpha_r;
    std::vector<double> dc_w, ds_w, dc_r, ds_r;
    firing_partials(winner, sample.features, rb.q, dc_w, ds_w);
    firing_partials(rival, sample.features, rb.q, dc_r, ds_r);

    const double outer = 2.0 * g.term;
    const std::size_t p = sample.features.size();
    g.d_center_winner.resize(p);
    g.d_spread_winner.resize(p);
    g.d_center_rival.resize(p);
    g.d_spread_rival.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        g.d_center_winner[j] = -outer * dc_w[j];
        g.d_spread_winner[j] = -outer * ds_w[j];
        g.d_center_rival[j] = outer * dc_r[j];
        g.d_spread_rival[j] = outer * ds_r[j];
    }
    return g;
}

void gradient_step(Rulebase& rb, const LabeledSample& sample, double eta,
                   const std::vector<double>& sigma_floor) {
    if (sigma_floor.size() != static_cast<std::size_t>(rb.num_features))
        throw std::invalid_argument("sigma floor dimension mismatch");
    const RivalSelection sel = select_rivals(rb, sample.features, sample.label);
    const SampleGradient g = per_sample_gradient(rb, sample, sel.winner_index, sel.rival_index);

    FuzzyRule& winner = rb.rules[sel.winner_index];
    FuzzyRule& rival = rb.rules[sel.rival_index];
    const std::size_t p = sample.features.size();
    for (std::size_t j = 0; j < p; ++j) {
        winner.centers[j] -= eta * g.d_center_winner[j];
        winner.spreads[j] -= eta * g.d_spread_winner[j];
        rival.centers[j] -= eta * g.d_center_rival[j];
        rival.spreads[j] -= eta * g.d_spread_rival[j];
        winner.spreads[j] = std::max(winner.spreads[j], sigma_floor[j]);
        rival.spreads[j] = std::max(rival.spreads[j], sigma_floor[j]);
    }
}

double default_learning_rate(const std::vector<LabeledSample>& data) {
    if (data.empty()) throw std::invalid_argument("training data is empty");
    const std::size_t p = data[0].features.size();
    std::vector<double> lo(p, std::numeric_limits<double>::infinity());
    std::vector<double> hi(p, -std::numeric_limits<double>::infinity());
    for (const LabeledSample& s : data)
        for (std::size_t j = 0; j < p; ++j) {
            lo[j] = std::min(lo[j], s.features[j]);
            hi[j] = std::max(hi[j], s.features[j]);
        }
    double mean_sq_range = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double r = hi[j] - lo[j];
        mean_sq_range += r * r;
    }
    mean_sq_range /= static_cast<double>(p);
    return 1e-5 * mean_sq_range;
}

double training_error_rate(const Rulebase& rb, const std::vector<LabeledSample>& data) {
    if (data.empty()) return 0.0;
    long long wrong = 0;
    for (const LabeledSample& s : data)
        if (classify_direct(rb, s.features).class_label != s.label) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

std::pair<Rulebase, TuningReport> tune(Rulebase rb, const std::vector<LabeledSample>& data,
                                       const TuningConfig& cfg) {
    rb.validate();
    if (data.empty()) throw std::invalid_argument("training data is empty");
    if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");

    const double eta = cfg.learning_rate > 0.0 ? cfg.learning_rate : default_learning_rate(data);
    const std::vector<double> floor = spread_floor(data);

    TuningReport report;
    report.learning_rate = eta;
    report.initial_error = error_E(rb, data);
    report.training_error_rate_before = training_error_rate(rb, data);

    double e_prev = report.initial_error;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (const LabeledSample& s : data) gradient_step(rb, s, eta, floor);
        const double e_curr = error_E(rb, data);
        report.epoch_errors.push_back(e_curr);
        report.epochs_run = epoch + 1;
        const double rel_decrease = (e_prev - e_curr) / std::max(e_prev, 1e-12);
        if (rel_decrease < cfg.rel_tol) break;
        e_prev = e_curr;
    }
    report.training_error_rate_after = training_error_rate(rb, data);
    return {std::move(rb), std::move(report)};
}

}  // namespace evfuzz
