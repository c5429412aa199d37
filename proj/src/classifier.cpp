#include "evfuzz/classifier.hpp"

#include <chrono>
#include <stdexcept>

namespace evfuzz {

namespace {

constexpr int kNeighborOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                        {0, 1},   {1, -1}, {1, 0},  {1, 1}};

int pignistic_argmax(const PignisticDistribution& p) {
    int best = 1;
    for (int k = 1; k < static_cast<int>(p.size()); ++k)
        if (p[static_cast<std::size_t>(k)] > p[static_cast<std::size_t>(best - 1)]) best = k + 1;
    return best;
}

}  // namespace

ConfidenceGrid compute_confidence_grid(const Rulebase& rb, const MultibandRaster& img, double tau) {
    if (img.bands != rb.num_features)
        throw std::invalid_argument("image band count does not match rulebase feature count");
    ConfidenceGrid grid;
    grid.width = img.width;
    grid.height = img.height;
    grid.num_classes = rb.num_classes;
    grid.values.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) *
                       static_cast<std::size_t>(rb.num_classes));
    for (int row = 0; row < img.height; ++row)
        for (int col = 0; col < img.width; ++col) {
            const ConfidenceVector cm = confidence_vector(rb, img.pixel(row, col), tau);
            double* out = grid.values.data() +
                          (static_cast<std::size_t>(row) * static_cast<std::size_t>(img.width) +
                           static_cast<std::size_t>(col)) * static_cast<std::size_t>(rb.num_classes);
            for (int k = 0; k < rb.num_classes; ++k) out[k] = cm[static_cast<std::size_t>(k)];
        }
    return grid;
}

int classify_pixel_evidential(const ConfidenceGrid& grid, int row, int col, BpaMode mode,
                              int fallback_label, ClassifyStats* stats) {
    if (row < 1 || row >= grid.height - 1 || col < 1 || col >= grid.width - 1)
        throw std::invalid_argument("evidential decision requires an interior pixel");

    const ConfidenceVector cm0 = grid.vector_at(row, col);
    try {
        std::vector<MassFunction> sources;
        sources.reserve(8);
        for (const auto& off : kNeighborOffsets)
            sources.push_back(
                bpa_from_confidences(cm0, grid.vector_at(row + off[0], col + off[1]), mode));
        const MassFunction global = combine_all(sources);
        return pignistic_argmax(pignistic(global));
    } catch (const TotalConflictError&) {
        if (stats) ++stats->conflict_fallbacks;
        return fallback_label;
    } catch (const DegenerateEvidenceError&) {
        if (stats) ++stats->conflict_fallbacks;
        return fallback_label;
    }
}

std::pair<LabelMap, ClassifyStats> classify_image(const Rulebase& rb, const MultibandRaster& img,
                                                  DecisionMode mode, BpaMode bpa_mode, double tau) {
    if (img.bands != rb.num_features)
        throw std::invalid_argument("image band count does not match rulebase feature count");
    const auto t0 = std::chrono::steady_clock::now();

    LabelMap lm;
    lm.width = img.width;
    lm.height = img.height;
    lm.labels.assign(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height), 0);
    ClassifyStats stats;
    stats.per_class_counts.assign(static_cast<std::size_t>(rb.num_classes), 0);

    // direct decisions are always needed: they are the answer in direct mode
    // and the border/conflict fallback in evidential mode
    for (int row = 0; row < img.height; ++row)
        for (int col = 0; col < img.width; ++col)
            lm.at(row, col) =
                static_cast<std::uint16_t>(classify_direct(rb, img.pixel(row, col)).class_label);

    if (mode == DecisionMode::evidential) {
        const ConfidenceGrid grid = compute_confidence_grid(rb, img, tau);
        LabelMap out = lm;
        for (int row = 0; row < img.height; ++row)
            for (int col = 0; col < img.width; ++col) {
                const bool interior =
                    row >= 1 && row < img.height - 1 && col >= 1 && col < img.width - 1;
                if (!interior) {
                    ++stats.border_pixels;
                    continue;
                }
                out.at(row, col) = static_cast<std::uint16_t>(
                    classify_pixel_evidential(grid, row, col, bpa_mode, lm.at(row, col), &stats));
            }
        lm = std::move(out);
    }

    for (std::uint16_t label : lm.labels) ++stats.per_class_counts[static_cast<std::size_t>(label - 1)];
    stats.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                           .count();
    return {std::move(lm), std::move(stats)};
}

}  // namespace evfuzz
