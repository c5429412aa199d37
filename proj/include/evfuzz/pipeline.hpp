#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "evfuzz/classifier.hpp"
#include "evfuzz/eval.hpp"
#include "evfuzz/induction.hpp"
#include "evfuzz/raster.hpp"
#include "evfuzz/tuning.hpp"

// End-to-end experiment driver: synth -> sample -> induce -> tune ->
// classify (direct and evidential) -> evaluate, writing every intermediate
// artifact into an output directory and a JSON report comparing the two
// decision modes. The CLI's `pipeline` subcommand is a thin wrapper over
// run_pipeline; all serialized outputs are byte-reproducible given the same
// config.

namespace evfuzz {

struct RunConfig {
    SceneSpec scene;
    int per_class = 800;
    std::uint64_t seed = 1;  // drives sampling and SOFM training
    double q = -10.0;
    double tau = kDefaultConfidenceThreshold;
    BpaMode bpa_mode = BpaMode::frame;
    InductionConfig induction;
    TuningConfig tuning;
};

// Config file mirror of RunConfig. "scene" is either an inline scene object
// or a path string resolved relative to the config file.
RunConfig load_run_config(const std::filesystem::path& path);

BpaMode bpa_mode_from_name(const std::string& name);
std::string bpa_mode_name(BpaMode mode);

nlohmann::json run_config_to_json(const RunConfig& cfg);

struct PipelineResult {
    Rulebase rulebase;
    TuningReport tuning;
    ConfusionMatrix direct_whole, direct_interior;
    ConfusionMatrix evidential_whole, evidential_interior;
    long long conflict_fallbacks = 0;
    nlohmann::json report;
};

PipelineResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace evfuzz
