#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "evfuzz/fuzzy.hpp"
#include "evfuzz/raster.hpp"

// Scoring against ground truth and the rulebase JSON format.
//
// Rulebase schema:
//   {"q": ..., "k_w": ..., "num_features": p, "num_classes": c,
//    "rules": [{"class": k, "v": [...], "sigma": [...]}, ...],
//    "provenance": {...seeds and config echo...}}
// Parameters survive the round trip exactly (doubles are emitted with
// shortest round-trip representation).

namespace evfuzz {

struct ConfusionMatrix {
    int num_classes = 0;
    std::vector<long long> counts;  // row-major, rows = true class, cols = predicted
    long long evaluated = 0;

    long long at(int true_class, int predicted) const {
        return counts[static_cast<std::size_t>(true_class - 1) *
                          static_cast<std::size_t>(num_classes) +
                      static_cast<std::size_t>(predicted - 1)];
    }
    double error_rate() const;
    std::vector<double> per_class_error() const;  // 0 for classes with no pixels
};

// Counts over pixels with ground-truth label != 0, optionally skipping the
// one-pixel image border. Throws on dimension mismatch or when nothing is
// evaluated.
ConfusionMatrix confusion_matrix(const LabelMap& pred, const GroundTruth& gt,
                                 bool exclude_borders = false);

nlohmann::json confusion_to_json(const ConfusionMatrix& cm);

nlohmann::json rulebase_to_json(const Rulebase& rb,
                                const nlohmann::json& provenance = nlohmann::json::object());
Rulebase rulebase_from_json(const nlohmann::json& j, nlohmann::json* provenance = nullptr);

void save_rulebase(const Rulebase& rb, const std::filesystem::path& path,
                   const nlohmann::json& provenance = nlohmann::json::object());
Rulebase load_rulebase(const std::filesystem::path& path, nlohmann::json* provenance = nullptr);

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace evfuzz
