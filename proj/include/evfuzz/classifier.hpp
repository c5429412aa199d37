#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "evfuzz/evidence.hpp"
#include "evfuzz/fuzzy.hpp"
#include "evfuzz/raster.hpp"

// Whole-image classification. Direct mode applies the argmax-firing decision
// per pixel. Evidential mode precomputes the per-pixel confidence vectors
// once, builds one BPA per 3x3 neighbor from (CM_center, CM_neighbor), folds
// the eight sources with Dempster's rule and decides by pignistic argmax.
// Border pixels (incomplete neighborhoods) take the direct decision.

namespace evfuzz {

enum class DecisionMode { direct, evidential };

struct ConfidenceGrid {
    int width = 0;
    int height = 0;
    int num_classes = 0;
    std::vector<double> values;  // (row * width + col) * num_classes + k

    const double* at(int row, int col) const {
        return values.data() +
               (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(col)) * static_cast<std::size_t>(num_classes);
    }
    ConfidenceVector vector_at(int row, int col) const {
        const double* p = at(row, col);
        return ConfidenceVector(p, p + num_classes);
    }
};

ConfidenceGrid compute_confidence_grid(const Rulebase& rb, const MultibandRaster& img,
                                       double tau = kDefaultConfidenceThreshold);

struct ClassifyStats {
    std::vector<long long> per_class_counts;
    long long conflict_fallbacks = 0;  // evidential pixels decided by direct fallback
    long long border_pixels = 0;       // pixels decided by the border policy
    double runtime_ms = 0.0;
};

// Evidential decision for one interior pixel. fallback_label (the pixel's
// direct decision) is used when the fold collapses: total conflict, or
// degenerate all-zero evidence in paper mode. stats, when given, counts those
// fallbacks.
int classify_pixel_evidential(const ConfidenceGrid& grid, int row, int col, BpaMode mode,
                              int fallback_label, ClassifyStats* stats = nullptr);

std::pair<LabelMap, ClassifyStats> classify_image(const Rulebase& rb, const MultibandRaster& img,
                                                  DecisionMode mode,
                                                  BpaMode bpa_mode = BpaMode::frame,
                                                  double tau = kDefaultConfidenceThreshold);

}  // namespace evfuzz
