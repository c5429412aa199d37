#pragma once

#include <cstdint>
#include <vector>

#include "evfuzz/fuzzy.hpp"

// Rulebase induction: labeled prototypes from a 1-D self-organizing map with
// majority labeling and purity pruning, spread initialization, and the
// prototype -> rule translation.

namespace evfuzz {

struct LabeledSample {
    FeatureVector features;
    int label = 0;  // 1..c
};

struct Prototype {
    std::vector<double> center;
    int label = 0;
};

struct PrototypeSet {
    std::vector<Prototype> prototypes;
    int num_features = 0;
    int num_classes = 0;
};

struct InductionConfig {
    double k_w = 2.0;           // spread multiplier
    int sofm_nodes = 16;        // units in the 1-D map; must be >= class count
    int sofm_epochs = 30;
    double lr_initial = 0.5;    // learning rate, linear decay
    double lr_final = 0.05;
    double radius_initial = -1.0;  // neighborhood radius; <= 0 means nodes/2
    double radius_final = 0.5;
    double purity_threshold = 0.5;  // units below this majority purity are pruned
    std::uint64_t rng_seed = 0;
};

// Number of classes implied by the data (the maximum label). Throws if the
// data is empty, any label is < 1, or some class in 1..max has no samples.
int count_classes(const std::vector<LabeledSample>& data);

// Index of the nearest prototype (Euclidean) for every sample; ties go to the
// lowest prototype index. The induced partition X_i is disjoint and covers
// the data.
std::vector<std::size_t> nearest_prototype_assignment(const PrototypeSet& protos,
                                                      const std::vector<LabeledSample>& data);

// Trains the SOFM unsupervised, labels each unit by the majority class of the
// points it wins, then prunes dead units and units whose purity falls below
// the threshold, re-assigning and repeating until stable. A class that ends
// up with no surviving unit gets a fallback prototype at its sample centroid,
// so every class is always represented. Deterministic per cfg.rng_seed.
PrototypeSet train_prototypes(const std::vector<LabeledSample>& data, const InductionConfig& cfg);

// Per-dimension spread floor: 1e-3 * data range (1e-3 when the range is 0).
std::vector<double> spread_floor(const std::vector<LabeledSample>& data);

// sigma_ij = k_w * sqrt(sum_{x in X_i} (x_j - v_ij)^2) / |X_i|, where X_i is
// the set of samples nearest to prototype i, floored at spread_floor(data).
std::vector<std::vector<double>> init_spreads(const PrototypeSet& protos,
                                              const std::vector<LabeledSample>& data, double k_w);

// One rule per prototype. Throws if some class 1..num_classes is absent.
Rulebase build_rulebase(const PrototypeSet& protos,
                        const std::vector<std::vector<double>>& spreads, double q, double k_w);

}  // namespace evfuzz
