#include "evfuzz/induction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "evfuzz/rng.hpp"

namespace evfuzz {

namespace {

double squared_distance(const std::vector<double>& a, const FeatureVector& b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

}  // namespace

int count_classes(const std::vector<LabeledSample>& data) {
    if (data.empty()) throw std::invalid_argument("training data is empty");
    int c = 0;
    for (const LabeledSample& s : data) {
        if (s.label < 1) throw std::invalid_argument("sample label must be >= 1");
        c = std::max(c, s.label);
    }
    std::vector<long long> counts(static_cast<std::size_t>(c), 0);
    for (const LabeledSample& s : data) ++counts[static_cast<std::size_t>(s.label - 1)];
    for (int k = 0; k < c; ++k)
        if (counts[static_cast<std::size_t>(k)] == 0)
            throw std::invalid_argument("class " + std::to_string(k + 1) + " has no samples");
    return c;
}

std::vector<std::size_t> nearest_prototype_assignment(const PrototypeSet& protos,
                                                      const std::vector<LabeledSample>& data) {
    if (protos.prototypes.empty()) throw std::invalid_argument("prototype set is empty");
    std::vector<std::size_t> assignment(data.size(), 0);
    for (std::size_t n = 0; n < data.size(); ++n) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < protos.prototypes.size(); ++i) {
            const double d = squared_distance(protos.prototypes[i].center, data[n].features);
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        assignment[n] = best_i;
    }
    return assignment;
}

PrototypeSet train_prototypes(const std::vector<LabeledSample>& data, const InductionConfig& cfg) {
    const int c = count_classes(data);
    const std::size_t p = data[0].features.size();
    for (const LabeledSample& s : data)
        if (s.features.size() != p) throw std::invalid_argument("inconsistent feature dimensions");
    if (cfg.sofm_nodes < c)
        throw std::invalid_argument("sofm_nodes (" + std::to_string(cfg.sofm_nodes) +
                                    ") must be >= number of classes (" + std::to_string(c) + ")");
    if (!(cfg.k_w > 0.0)) throw std::invalid_argument("k_w must be positive");
    if (cfg.sofm_epochs < 1) throw std::invalid_argument("sofm_epochs must be >= 1");

    Rng rng(cfg.rng_seed);
    const std::size_t nodes = static_cast<std::size_t>(cfg.sofm_nodes);

    // Initialize units on data points sampled without replacement (with
    // replacement once the data is exhausted).
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::vector<double>> units(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        std::size_t pick;
        if (i < data.size()) {
            const std::size_t j = i + rng.uniform_below(data.size() - i);
            std::swap(order[i], order[j]);
            pick = order[i];
        } else {
            pick = rng.uniform_below(data.size());
        }
        units[i].assign(data[pick].features.begin(), data[pick].features.end());
    }

    const double radius0 = cfg.radius_initial > 0.0 ? cfg.radius_initial
                                                    : static_cast<double>(nodes) / 2.0;

    // Unsupervised pass: linear decay of learning rate and neighborhood
    // radius, Gaussian neighborhood on the 1-D chain, seeded shuffle of the
    // presentation order each epoch.
    std::vector<std::size_t> epoch_order(data.size());
    std::iota(epoch_order.begin(), epoch_order.end(), std::size_t{0});
    for (int e = 0; e < cfg.sofm_epochs; ++e) {
        const double t = cfg.sofm_epochs > 1
                             ? static_cast<double>(e) / static_cast<double>(cfg.sofm_epochs - 1)
                             : 0.0;
        const double lr = cfg.lr_initial + (cfg.lr_final - cfg.lr_initial) * t;
        const double radius = std::max(radius0 + (cfg.radius_final - radius0) * t, 1e-3);

        for (std::size_t i = 0; i + 1 < epoch_order.size(); ++i) {
            const std::size_t j = i + rng.uniform_below(epoch_order.size() - i);
            std::swap(epoch_order[i], epoch_order[j]);
        }
        for (std::size_t n : epoch_order) {
            const FeatureVector& x = data[n].features;
            double best = std::numeric_limits<double>::infinity();
            std::size_t bmu = 0;
            for (std::size_t u = 0; u < nodes; ++u) {
                const double d = squared_distance(units[u], x);
                if (d < best) {
                    best = d;
                    bmu = u;
                }
            }
            for (std::size_t u = 0; u < nodes; ++u) {
                const double idx_dist = static_cast<double>(u) - static_cast<double>(bmu);
                const double h = std::exp(-idx_dist * idx_dist / (2.0 * radius * radius));
                const double step = lr * h;
                if (step < 1e-12) continue;
                for (std::size_t j = 0; j < p; ++j) units[u][j] += step * (x[j] - units[u][j]);
            }
        }
    }

    // Supervised pass: majority-label each unit, then prune dead and impure
    // units until stable. A pruning round never removes the last (most pure)
    // unit of a class that still has one.
    struct Unit {
        std::vector<double> center;
        int label = 0;
        double purity = 0.0;
        long long wins = 0;
    };
    std::vector<Unit> live;
    live.reserve(nodes);
    for (auto& u : units) live.push_back(Unit{std::move(u), 0, 0.0, 0});

    bool changed = true;
    while (changed && !live.empty()) {
        changed = false;
        for (Unit& u : live) {
            u.wins = 0;
            u.label = 0;
            u.purity = 0.0;
        }
        std::vector<std::vector<long long>> class_wins(
            live.size(), std::vector<long long>(static_cast<std::size_t>(c), 0));
        for (const LabeledSample& s : data) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t bmu = 0;
            for (std::size_t u = 0; u < live.size(); ++u) {
                const double d = squared_distance(live[u].center, s.features);
                if (d < best) {
                    best = d;
                    bmu = u;
                }
            }
            ++live[bmu].wins;
            ++class_wins[bmu][static_cast<std::size_t>(s.label - 1)];
        }
        for (std::size_t u = 0; u < live.size(); ++u) {
            if (live[u].wins == 0) continue;
            long long best = -1;
            for (int k = 0; k < c; ++k)
                if (class_wins[u][static_cast<std::size_t>(k)] > best) {
                    best = class_wins[u][static_cast<std::size_t>(k)];
                    live[u].label = k + 1;
                }
            live[u].purity = static_cast<double>(best) / static_cast<double>(live[u].wins);
        }

        std::vector<bool> keep(live.size(), true);
        for (std::size_t u = 0; u < live.size(); ++u) {
            if (live[u].wins == 0 || live[u].purity < cfg.purity_threshold) keep[u] = false;
        }
        // protect the best impure unit of a class whose units would all go
        for (int k = 1; k <= c; ++k) {
            bool survives = false;
            for (std::size_t u = 0; u < live.size(); ++u)
                if (keep[u] && live[u].label == k) survives = true;
            if (survives) continue;
            std::size_t best_u = live.size();
            for (std::size_t u = 0; u < live.size(); ++u) {
                if (live[u].label != k || live[u].wins == 0) continue;
                if (best_u == live.size() || live[u].purity > live[best_u].purity) best_u = u;
            }
            if (best_u < live.size()) keep[best_u] = true;
        }

        std::vector<Unit> next;
        next.reserve(live.size());
        for (std::size_t u = 0; u < live.size(); ++u)
            if (keep[u]) next.push_back(std::move(live[u]));
        if (next.size() != live.size()) changed = true;
        live = std::move(next);
    }

    PrototypeSet out;
    out.num_features = static_cast<int>(p);
    out.num_classes = c;
    for (Unit& u : live) out.prototypes.push_back(Prototype{std::move(u.center), u.label});

    // Majority labeling can starve a class entirely; fall back to the class
    // centroid so the prototype set always covers 1..c.
    std::vector<bool> covered(static_cast<std::size_t>(c), false);
    for (const Prototype& pr : out.prototypes) covered[static_cast<std::size_t>(pr.label - 1)] = true;
    for (int k = 1; k <= c; ++k) {
        if (covered[static_cast<std::size_t>(k - 1)]) continue;
        std::vector<double> centroid(p, 0.0);
        long long n = 0;
        for (const LabeledSample& s : data) {
            if (s.label != k) continue;
            for (std::size_t j = 0; j < p; ++j) centroid[j] += s.features[j];
            ++n;
        }
        for (double& v : centroid) v /= static_cast<double>(n);
        out.prototypes.push_back(Prototype{std::move(centroid), k});
    }
    return out;
}

std::vector<double> spread_floor(const std::vector<LabeledSample>& data) {
    if (data.empty()) throw std::invalid_argument("training data is empty");
    const std::size_t p = data[0].features.size();
    std::vector<double> lo(p, std::numeric_limits<double>::infinity());
    std::vector<double> hi(p, -std::numeric_limits<double>::infinity());
    for (const LabeledSample& s : data)
        for (std::size_t j = 0; j < p; ++j) {
            lo[j] = std::min(lo[j], s.features[j]);
            hi[j] = std::max(hi[j], s.features[j]);
        }
    std::vector<double> floor(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double range = hi[j] - lo[j];
        floor[j] = 1e-3 * (range > 0.0 ? range : 1.0);
    }
    return floor;
}

std::vector<std::vector<double>> init_spreads(const PrototypeSet& protos,
                                              const std::vector<LabeledSample>& data, double k_w) {
    if (!(k_w > 0.0)) throw std::invalid_argument("k_w must be positive");
    const std::size_t p = static_cast<std::size_t>(protos.num_features);
    const std::vector<std::size_t> assignment = nearest_prototype_assignment(protos, data);
    const std::vector<double> floor = spread_floor(data);

    std::vector<std::vector<double>> sq_sums(protos.prototypes.size(), std::vector<double>(p, 0.0));
    std::vector<long long> counts(protos.prototypes.size(), 0);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const std::size_t i = assignment[n];
        ++counts[i];
        for (std::size_t j = 0; j < p; ++j) {
            const double d = data[n].features[j] - protos.prototypes[i].center[j];
            sq_sums[i][j] += d * d;
        }
    }

    std::vector<std::vector<double>> spreads(protos.prototypes.size(), std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < protos.prototypes.size(); ++i)
        for (std::size_t j = 0; j < p; ++j) {
            // sqrt of the summed squares first, then the cardinality divide
            double sigma = 0.0;
            if (counts[i] > 0)
                sigma = k_w * std::sqrt(sq_sums[i][j]) / static_cast<double>(counts[i]);
            spreads[i][j] = std::max(sigma, floor[j]);
        }
    return spreads;
}

Rulebase build_rulebase(const PrototypeSet& protos,
                        const std::vector<std::vector<double>>& spreads, double q, double k_w) {
    if (spreads.size() != protos.prototypes.size())
        throw std::invalid_argument("spreads not aligned with prototypes");
    Rulebase rb;
    rb.num_features = protos.num_features;
    rb.num_classes = protos.num_classes;
    rb.q = q;
    rb.k_w = k_w;
    for (std::size_t i = 0; i < protos.prototypes.size(); ++i) {
        FuzzyRule rule;
        rule.class_label = protos.prototypes[i].label;
        rule.centers = protos.prototypes[i].center;
        rule.spreads = spreads[i];
        rb.rules.push_back(std::move(rule));
    }
    rb.validate();
    return rb;
}

}  // namespace evfuzz
