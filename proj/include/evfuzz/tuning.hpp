#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "evfuzz/fuzzy.hpp"
#include "evfuzz/induction.hpp"

// Gradient-descent refinement of rule centers and spreads. For each training
// sample the winner rule of the true class and the strongest rival from the
// other classes are picked, and the squared margin term (1 - a_c + a_rival)^2
// is descended with respect to the two rules' parameters only.

namespace evfuzz {

struct TuningConfig {
    double learning_rate = 0.0;  // <= 0 selects default_learning_rate(data)
    int max_epochs = 500;
    double rel_tol = 1e-4;  // stop when the relative decrease of E drops below
};

struct TuningReport {
    std::vector<double> epoch_errors;  // E after each epoch
    int epochs_run = 0;
    double initial_error = 0.0;  // E before any update
    double learning_rate = 0.0;  // the rate actually used
    double training_error_rate_before = 0.0;
    double training_error_rate_after = 0.0;
};

struct RivalSelection {
    std::size_t winner_index = 0;  // strongest rule of the true class
    double winner_firing = 0.0;
    std::size_t rival_index = 0;  // strongest rule of any other class
    double rival_firing = 0.0;
};

// Ties go to the lowest rule index. Throws when the true class has no rule or
// every rule belongs to the true class.
RivalSelection select_rivals(const Rulebase& rb, const FeatureVector& x, int true_class);

// E = sum over samples of (1 - a_c + a_rival)^2; bounded by 4 * |data|.
double error_E(const Rulebase& rb, const std::vector<LabeledSample>& data);

// Gradient of the squared per-sample term with respect to the centers and
// spreads of the two selected rules, everything else held fixed.
struct SampleGradient {
    double term = 0.0;  // 1 - a_c + a_rival
    std::vector<double> d_center_winner, d_spread_winner;
    std::vector<double> d_center_rival, d_spread_rival;
};

SampleGradient per_sample_gradient(const Rulebase& rb, const LabeledSample& sample,
                                   std::size_t winner_index, std::size_t rival_index);

// One stochastic update: selects rivals, applies theta -= eta * grad to the
// two rules' parameters, re-floors spreads at sigma_floor. No other rule is
// touched.
void gradient_step(Rulebase& rb, const LabeledSample& sample, double eta,
                   const std::vector<double>& sigma_floor);

// 1e-5 * (mean squared per-dimension feature range); raw band scales make a
// universal constant unsafe.
double default_learning_rate(const std::vector<LabeledSample>& data);

// Fraction of samples misclassified by classify_direct.
double training_error_rate(const Rulebase& rb, const std::vector<LabeledSample>& data);

// Epochs of per-sample updates in fixed data order until the relative
// decrease of E falls below rel_tol or max_epochs is hit.
std::pair<Rulebase, TuningReport> tune(Rulebase rb, const std::vector<LabeledSample>& data,
                                       const TuningConfig& cfg);

}  // namespace evfuzz
