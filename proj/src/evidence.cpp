#include "evfuzz/evidence.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace evfuzz {

namespace {

constexpr double kMassFlushThreshold = 1e-12;  // masses below this are noise
constexpr double kConflictDenomFloor = 1e-12;  // 1-K below this is total conflict

std::string conflict_message(double k, int pos) {
    std::string msg = "total conflict in Dempster combination (K = " + std::to_string(k) + ")";
    if (pos >= 0) msg += " at fold position " + std::to_string(pos);
    return msg;
}

struct Focal {
    std::uint32_t mask;
    double mass;
};

void collect_focals(const MassFunction& m, std::vector<Focal>& out) {
    const int c = m.num_classes;
    for (int k = 0; k < c; ++k)
        if (m.singleton[static_cast<std::size_t>(k)] > 0.0)
            out.push_back({std::uint32_t{1} << k, m.singleton[static_cast<std::size_t>(k)]});
    for (int l = 0; l < c; ++l)
        for (int mm = l + 1; mm < c; ++mm) {
            const double mass = m.pair[MassFunction::pair_index(l, mm, c)];
            if (mass > 0.0) out.push_back({(std::uint32_t{1} << l) | (std::uint32_t{1} << mm), mass});
        }
    if (m.frame > 0.0) out.push_back({full_frame_mask(c), m.frame});
}

void check_same_frame(const MassFunction& a, const MassFunction& b) {
    if (a.num_classes != b.num_classes)
        throw std::invalid_argument("mass functions defined over different frames");
}

void flush_tiny(MassFunction& m) {
    for (double& v : m.singleton)
        if (v < kMassFlushThreshold) v = 0.0;
    for (double& v : m.pair)
        if (v < kMassFlushThreshold) v = 0.0;
    if (m.frame < kMassFlushThreshold) m.frame = 0.0;
}

}  // namespace

TotalConflictError::TotalConflictError(double k, int pos)
    : std::runtime_error(conflict_message(k, pos)), conflict(k), fold_position(pos) {}

DegenerateEvidenceError::DegenerateEvidenceError()
    : std::runtime_error("degenerate evidence: all confidences zero, no mass assignable") {}

std::size_t MassFunction::pair_index(int l, int m, int c) {
    // upper-triangular row-major enumeration of pairs l < m
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(c) -
           static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1) / 2 +
           static_cast<std::size_t>(m - l - 1);
}

MassFunction MassFunction::zeros(int c) {
    MassFunction m;
    m.num_classes = c;
    m.singleton.assign(static_cast<std::size_t>(c), 0.0);
    m.pair.assign(static_cast<std::size_t>(c) * static_cast<std::size_t>(c - 1) / 2, 0.0);
    m.frame = 0.0;
    return m;
}

MassFunction MassFunction::vacuous(int c) {
    MassFunction m = zeros(c);
    m.frame = 1.0;
    return m;
}

double MassFunction::total() const {
    double t = frame;
    for (double v : singleton) t += v;
    for (double v : pair) t += v;
    return t;
}

std::uint32_t full_frame_mask(int num_classes) {
    return num_classes >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << num_classes) - 1;
}

MassFunction bpa_from_confidences(const ConfidenceVector& cm0, const ConfidenceVector& cmi,
                                  BpaMode mode) {
    const int c = static_cast<int>(cm0.size());
    if (c < 2) throw std::invalid_argument("frame needs at least two classes");
    if (cmi.size() != cm0.size())
        throw std::invalid_argument("confidence vectors of different length");

    auto numerator = [&](int a, int b) {
        // average of the two sources' confidences, damped by their disagreement
        const double avg = 0.5 * (cmi[static_cast<std::size_t>(a)] + cm0[static_cast<std::size_t>(b)]);
        const double diff = cmi[static_cast<std::size_t>(a)] - cm0[static_cast<std::size_t>(b)];
        return avg * std::exp(-diff * diff);
    };

    MassFunction m = MassFunction::zeros(c);
    double s = 0.0;
    for (int k = 0; k < c; ++k) {
        const double num = numerator(k, k);
        m.singleton[static_cast<std::size_t>(k)] = num;
        s += num;
    }
    for (int l = 0; l < c; ++l)
        for (int mm = l + 1; mm < c; ++mm) {
            const double num = numerator(l, mm) + numerator(mm, l);
            m.pair[MassFunction::pair_index(l, mm, c)] = num;
            s += num;
        }

    if (s <= 0.0) {
        if (mode == BpaMode::paper) throw DegenerateEvidenceError();
        return MassFunction::vacuous(c);
    }

    for (double& v : m.singleton) v /= s;
    for (double& v : m.pair) v /= (2.0 * s);
    flush_tiny(m);
    if (mode == BpaMode::frame) m.frame = std::max(0.0, 1.0 - m.total());
    return m;
}

double bel(const MassFunction& m, std::uint32_t subset_mask) {
    const int c = m.num_classes;
    double acc = 0.0;
    for (int k = 0; k < c; ++k)
        if (subset_mask & (std::uint32_t{1} << k)) acc += m.singleton[static_cast<std::size_t>(k)];
    for (int l = 0; l < c; ++l)
        for (int mm = l + 1; mm < c; ++mm) {
            const std::uint32_t pm = (std::uint32_t{1} << l) | (std::uint32_t{1} << mm);
            if ((pm & subset_mask) == pm) acc += m.pair[MassFunction::pair_index(l, mm, c)];
        }
    if ((subset_mask & full_frame_mask(c)) == full_frame_mask(c)) acc += m.frame;
    return acc;
}

double pl(const MassFunction& m, std::uint32_t subset_mask) {
    const int c = m.num_classes;
    double acc = 0.0;
    for (int k = 0; k < c; ++k)
        if (subset_mask & (std::uint32_t{1} << k)) acc += m.singleton[static_cast<std::size_t>(k)];
    for (int l = 0; l < c; ++l)
        for (int mm = l + 1; mm < c; ++mm) {
            const std::uint32_t pm = (std::uint32_t{1} << l) | (std::uint32_t{1} << mm);
            if (pm & subset_mask) acc += m.pair[MassFunction::pair_index(l, mm, c)];
        }
    if (subset_mask & full_frame_mask(c)) acc += m.frame;
    return acc;
}

MassFunction dempster_combine(const MassFunction& m1, const MassFunction& m2) {
    check_same_frame(m1, m2);
    const int c = m1.num_classes;
    std::vector<Focal> f1, f2;
    collect_focals(m1, f1);
    collect_focals(m2, f2);

    MassFunction out = MassFunction::zeros(c);
    const std::uint32_t full = full_frame_mask(c);
    double conflict = 0.0;
    for (const Focal& a : f1)
        for (const Focal& b : f2) {
            const std::uint32_t inter = a.mask & b.mask;
            const double mass = a.mass * b.mass;
            if (inter == 0) {
                conflict += mass;
                continue;
            }
            const int bits = std::popcount(inter);
            if (bits == 1) {
                out.singleton[static_cast<std::size_t>(std::countr_zero(inter))] += mass;
            } else if (bits == 2) {
                const int l = std::countr_zero(inter);
                const int mm = 31 - std::countl_zero(inter);
                out.pair[MassFunction::pair_index(l, mm, c)] += mass;
            } else if (inter == full) {
                out.frame += mass;
            } else {
                throw std::logic_error("intersection left the singleton/pair/frame family");
            }
        }

    const double denom = 1.0 - conflict;
    if (denom <= kConflictDenomFloor) throw TotalConflictError(conflict);
    for (double& v : out.singleton) v /= denom;
    for (double& v : out.pair) v /= denom;
    out.frame /= denom;
    flush_tiny(out);
    return out;
}

MassFunction combine_all(const std::vector<MassFunction>& masses) {
    if (masses.empty()) throw std::invalid_argument("combine_all of empty sequence");
    MassFunction acc = masses.front();
    for (std::size_t i = 1; i < masses.size(); ++i) {
        try {
            acc = dempster_combine(acc, masses[i]);
        } catch (const TotalConflictError& e) {
            throw TotalConflictError(e.conflict, static_cast<int>(i));
        }
    }
    return acc;
}

PignisticDistribution pignistic(const MassFunction& m) {
    const int c = m.num_classes;
    PignisticDistribution p(static_cast<std::size_t>(c), 0.0);
    for (int k = 0; k < c; ++k) {
        double v = m.singleton[static_cast<std::size_t>(k)];
        for (int l = 0; l < c; ++l) {
            if (l == k) continue;
            const std::size_t idx = l < k ? MassFunction::pair_index(l, k, c)
                                          : MassFunction::pair_index(k, l, c);
            v += 0.5 * m.pair[idx];
        }
        v += m.frame / static_cast<double>(c);
        p[static_cast<std::size_t>(k)] = v;
    }
    return p;
}

}  // namespace evfuzz
