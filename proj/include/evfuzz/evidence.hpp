#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "evfuzz/fuzzy.hpp"

// Dempster-Shafer machinery over the class frame. Focal elements are
// restricted to singletons {C_k}, unordered pairs {C_l, C_m} and the full
// frame; that family is closed under intersection, so Dempster's rule never
// leaves it.

namespace evfuzz {

enum class BpaMode {
    paper,  // masses exactly as constructed from the confidences; the total
            // over singletons + pairs may fall short of 1
    frame   // the shortfall is assigned to the full frame as uncommitted
            // belief, making the mass function a proper BPA
};

using PignisticDistribution = std::vector<double>;

struct MassFunction {
    int num_classes = 0;
    std::vector<double> singleton;  // size c
    std::vector<double> pair;       // size c*(c-1)/2, unordered pairs l < m
    double frame = 0.0;             // mass on the full frame

    // Index of the unordered pair {l, m}, 0-based, l < m.
    static std::size_t pair_index(int l, int m, int c);

    static MassFunction zeros(int c);
    static MassFunction vacuous(int c);  // all mass on the frame

    double total() const;
};

// Dempster combination met total conflict (K = 1): nothing survives
// normalization.
struct TotalConflictError : std::runtime_error {
    double conflict = 1.0;
    int fold_position = -1;  // index of the operand that triggered it, -1 if n/a
    explicit TotalConflictError(double k, int pos = -1);
};

// All confidences zero on both pixels: every numerator vanishes and no mass
// can be assigned (paper mode only; frame mode returns the vacuous mass).
struct DegenerateEvidenceError : std::runtime_error {
    DegenerateEvidenceError();
};

// Builds the i-th source of evidence from the confidence vectors of the
// center pixel (cm0) and one neighbor (cmi). Singleton numerators are
// ((a_k^i + a_k^0)/2) * exp(-(a_k^i - a_k^0)^2); pair numerators are the
// symmetric two-term sum; everything is normalized by the sum S of all
// numerators, pairs getting num/(2S).
MassFunction bpa_from_confidences(const ConfidenceVector& cm0,
                                  const ConfidenceVector& cmi, BpaMode mode);

// Subsets of the frame are bitmasks: bit k set means class k+1 is in.
std::uint32_t full_frame_mask(int num_classes);

// Bel(A) = sum of masses of focal elements contained in A.
double bel(const MassFunction& m, std::uint32_t subset_mask);

// Pl(A) = sum of masses of focal elements intersecting A.
double pl(const MassFunction& m, std::uint32_t subset_mask);

// Dempster's rule: enumerate focal-element pairs, intersect, renormalize by
// 1 - K. Throws TotalConflictError when 1 - K vanishes.
MassFunction dempster_combine(const MassFunction& m1, const MassFunction& m2);

// Left fold of dempster_combine. TotalConflictError is annotated with the
// position of the operand at which the fold died.
MassFunction combine_all(const std::vector<MassFunction>& masses);

// P(C_k) = m({C_k}) + (1/2) sum_{l != k} m({C_k, C_l}) + m(frame)/c.
PignisticDistribution pignistic(const MassFunction& m);

}  // namespace evfuzz
