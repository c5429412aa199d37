#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "evfuzz/fuzzy.hpp"
#include "evfuzz/induction.hpp"

// Multiband raster container and its bit-exact on-disk format, ground-truth
// handling, stratified training-set sampling, and the synthetic scene
// generator.
//
// On disk a raster is a JSON descriptor plus a raw payload:
//   {"width": W, "height": H, "bands": B, "dtype": "u8"|"u16"|"f32",
//    "layout": "band-sequential", "endianness": "little", "data": "<file>"}
// The payload is little-endian, band-sequential (band 0 row-major, then
// band 1, ...). "data" is resolved relative to the descriptor's directory.

namespace evfuzz {

enum class Dtype { u8, u16, f32 };

std::string dtype_name(Dtype dt);
std::size_t dtype_size(Dtype dt);

struct MultibandRaster {
    int width = 0;
    int height = 0;
    int bands = 0;
    Dtype dtype = Dtype::u8;
    // Band-sequential. u8/u16 payloads hold integral values; every
    // representable u8/u16/f32 value survives the float round-trip exactly.
    std::vector<float> data;

    float at(int band, int row, int col) const {
        return data[(static_cast<std::size_t>(band) * static_cast<std::size_t>(height) +
                     static_cast<std::size_t>(row)) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(col)];
    }
    float& at(int band, int row, int col) {
        return data[(static_cast<std::size_t>(band) * static_cast<std::size_t>(height) +
                     static_cast<std::size_t>(row)) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(col)];
    }
    FeatureVector pixel(int row, int col) const;
};

struct GroundTruth {
    int width = 0;
    int height = 0;
    int num_classes = 0;              // labels run 0 (unlabeled) .. num_classes
    std::vector<std::uint16_t> labels;  // row-major

    std::uint16_t at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
};

struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> labels;  // row-major, 0 = undecided

    std::uint16_t at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
    std::uint16_t& at(int row, int col) {
        return labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
};

MultibandRaster load_raster(const std::filesystem::path& descriptor);
void save_raster(const MultibandRaster& img, const std::filesystem::path& descriptor);

// Ground truth and label maps share the raster container: 1 band, dtype u16.
GroundTruth load_ground_truth(const std::filesystem::path& descriptor);
void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& descriptor);
LabelMap load_label_map(const std::filesystem::path& descriptor);
void save_label_map(const LabelMap& lm, const std::filesystem::path& descriptor);

// Stratified sampling without replacement: exactly per_class samples for each
// class 1..c, never touching unlabeled (0) pixels. Deterministic per seed.
// Throws (naming the class) when a class has too few labeled pixels.
std::vector<LabeledSample> sample_training_set(const MultibandRaster& img, const GroundTruth& gt,
                                               int per_class, std::uint64_t seed);

// Training sets serialize as CSV: header "f1,...,fp,label", one sample per
// row, features with round-trip precision.
void write_training_csv(const std::filesystem::path& path,
                        const std::vector<LabeledSample>& samples, int num_features);
std::vector<LabeledSample> read_training_csv(const std::filesystem::path& path,
                                             int* num_features = nullptr);

struct ClassModel {
    std::vector<double> means;  // per band
    std::vector<double> stds;   // per band, all > 0
};

struct SceneSpec {
    int width = 0;
    int height = 0;
    int bands = 0;
    int num_classes = 0;
    int sites = 0;  // Voronoi seed sites; must be >= num_classes
    Dtype dtype = Dtype::u8;
    std::vector<ClassModel> class_models;  // one per class
    double pixel_noise_fraction = 0.0;     // pixels redrawn from a random class's model
    std::uint64_t rng_seed = 0;
};

SceneSpec load_scene_spec(const std::filesystem::path& path);

// Voronoi partition of the image by `sites` random class-labeled sites (the
// first num_classes sites take classes 1..c so every class owns at least
// one); band values drawn from the owning class's per-band Gaussian, clamped
// to the dtype range. Fully deterministic per rng_seed.
std::pair<MultibandRaster, GroundTruth> generate_scene(const SceneSpec& spec);

}  // namespace evfuzz
