#include "evfuzz/eval.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace evfuzz {

using nlohmann::json;

double ConfusionMatrix::error_rate() const {
    long long correct = 0;
    for (int k = 1; k <= num_classes; ++k) correct += at(k, k);
    return 1.0 - static_cast<double>(correct) / static_cast<double>(evaluated);
}

std::vector<double> ConfusionMatrix::per_class_error() const {
    std::vector<double> rates(static_cast<std::size_t>(num_classes), 0.0);
    for (int k = 1; k <= num_classes; ++k) {
        long long row_total = 0;
        for (int l = 1; l <= num_classes; ++l) row_total += at(k, l);
        if (row_total > 0)
            rates[static_cast<std::size_t>(k - 1)] =
                1.0 - static_cast<double>(at(k, k)) / static_cast<double>(row_total);
    }
    return rates;
}

ConfusionMatrix confusion_matrix(const LabelMap& pred, const GroundTruth& gt,
                                 bool exclude_borders) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::invalid_argument("prediction and ground truth dimensions differ");
    ConfusionMatrix cm;
    cm.num_classes = gt.num_classes;
    cm.counts.assign(static_cast<std::size_t>(gt.num_classes) *
                         static_cast<std::size_t>(gt.num_classes),
                     0);
    for (int row = 0; row < gt.height; ++row)
        for (int col = 0; col < gt.width; ++col) {
            if (exclude_borders &&
                (row == 0 || row == gt.height - 1 || col == 0 || col == gt.width - 1))
                continue;
            const int truth = gt.at(row, col);
            if (truth == 0) continue;
            const int predicted = pred.at(row, col);
            if (predicted < 1 || predicted > gt.num_classes)
                throw std::invalid_argument("predicted label " + std::to_string(predicted) +
                                            " outside 1.." + std::to_string(gt.num_classes));
            ++cm.counts[static_cast<std::size_t>(truth - 1) *
                            static_cast<std::size_t>(gt.num_classes) +
                        static_cast<std::size_t>(predicted - 1)];
            ++cm.evaluated;
        }
    if (cm.evaluated == 0)
        throw std::runtime_error("no pixels evaluated: ground truth is all unlabeled");
    return cm;
}

json confusion_to_json(const ConfusionMatrix& cm) {
    json rows = json::array();
    for (int k = 1; k <= cm.num_classes; ++k) {
        json row = json::array();
        for (int l = 1; l <= cm.num_classes; ++l) row.push_back(cm.at(k, l));
        rows.push_back(std::move(row));
    }
    return json{{"counts", std::move(rows)},
                {"evaluated_pixels", cm.evaluated},
                {"error_rate", cm.error_rate()},
                {"per_class_error", cm.per_class_error()}};
}

json rulebase_to_json(const Rulebase& rb, const json& provenance) {
    rb.validate();
    json rules = json::array();
    for (const FuzzyRule& r : rb.rules)
        rules.push_back(json{{"class", r.class_label}, {"v", r.centers}, {"sigma", r.spreads}});
    return json{{"q", rb.q},
                {"k_w", rb.k_w},
                {"num_features", rb.num_features},
                {"num_classes", rb.num_classes},
                {"rules", std::move(rules)},
                {"provenance", provenance}};
}

Rulebase rulebase_from_json(const json& j, json* provenance) {
    Rulebase rb;
    try {
        rb.q = j.at("q").get<double>();
        rb.k_w = j.at("k_w").get<double>();
        rb.num_features = j.at("num_features").get<int>();
        rb.num_classes = j.at("num_classes").get<int>();
        for (const json& r : j.at("rules")) {
            FuzzyRule rule;
            rule.class_label = r.at("class").get<int>();
            rule.centers = r.at("v").get<std::vector<double>>();
            rule.spreads = r.at("sigma").get<std::vector<double>>();
            rb.rules.push_back(std::move(rule));
        }
        if (provenance) *provenance = j.value("provenance", json::object());
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed rulebase JSON: ") + e.what());
    }
    rb.validate();
    return rb;
}

void save_rulebase(const Rulebase& rb, const std::filesystem::path& path, const json& provenance) {
    write_json_file(rulebase_to_json(rb, provenance), path);
}

Rulebase load_rulebase(const std::filesystem::path& path, json* provenance) {
    return rulebase_from_json(read_json_file(path), provenance);
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace evfuzz
