#include "evfuzz/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "evfuzz/rng.hpp"

namespace evfuzz {

namespace {

using nlohmann::json;

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open payload file: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("failed reading payload file: " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const unsigned char* data,
                      std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

Dtype dtype_from_name(const std::string& name) {
    if (name == "u8") return Dtype::u8;
    if (name == "u16") return Dtype::u16;
    if (name == "f32") return Dtype::f32;
    throw std::runtime_error("unknown dtype \"" + name + "\" (expected u8, u16 or f32)");
}

struct RawRaster {
    int width = 0, height = 0, bands = 0;
    Dtype dtype = Dtype::u8;
    std::vector<float> values;
};

RawRaster load_raw(const std::filesystem::path& descriptor) {
    std::ifstream in(descriptor);
    if (!in) throw std::runtime_error("cannot open raster descriptor: " + descriptor.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad raster descriptor " + descriptor.string() + ": " + e.what());
    }
    for (const char* key : {"width", "height", "bands", "dtype", "layout", "endianness", "data"})
        if (!j.contains(key))
            throw std::runtime_error("raster descriptor missing field \"" + std::string(key) + "\"");
    if (j["layout"].get<std::string>() != "band-sequential")
        throw std::runtime_error("unsupported layout: " + j["layout"].get<std::string>());
    if (j["endianness"].get<std::string>() != "little")
        throw std::runtime_error("unsupported endianness: " + j["endianness"].get<std::string>());

    RawRaster r;
    r.width = j["width"].get<int>();
    r.height = j["height"].get<int>();
    r.bands = j["bands"].get<int>();
    r.dtype = dtype_from_name(j["dtype"].get<std::string>());
    if (r.width < 1 || r.height < 1 || r.bands < 1)
        throw std::runtime_error("raster dimensions must be positive");

    const std::filesystem::path payload_path =
        descriptor.parent_path() / j["data"].get<std::string>();
    const std::vector<unsigned char> bytes = read_file_bytes(payload_path);
    const std::size_t count = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height) *
                              static_cast<std::size_t>(r.bands);
    const std::size_t expected = count * dtype_size(r.dtype);
    if (bytes.size() != expected)
        throw std::runtime_error("payload size mismatch for " + payload_path.string() + ": expected " +
                                 std::to_string(expected) + " bytes, found " +
                                 std::to_string(bytes.size()));

    r.values.resize(count);
    switch (r.dtype) {
        case Dtype::u8:
            for (std::size_t i = 0; i < count; ++i) r.values[i] = static_cast<float>(bytes[i]);
            break;
        case Dtype::u16:
            for (std::size_t i = 0; i < count; ++i) {
                const std::uint16_t v = static_cast<std::uint16_t>(
                    bytes[2 * i] | (static_cast<std::uint16_t>(bytes[2 * i + 1]) << 8));
                r.values[i] = static_cast<float>(v);
            }
            break;
        case Dtype::f32:
            for (std::size_t i = 0; i < count; ++i) {
                const std::uint32_t v = static_cast<std::uint32_t>(bytes[4 * i]) |
                                        (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                                        (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                                        (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
                r.values[i] = std::bit_cast<float>(v);
            }
            break;
    }
    return r;
}

void save_raw(const RawRaster& r, const std::filesystem::path& descriptor) {
    std::filesystem::path payload_path = descriptor;
    payload_path.replace_extension(".bin");

    const std::size_t count = r.values.size();
    std::vector<unsigned char> bytes(count * dtype_size(r.dtype));
    switch (r.dtype) {
        case Dtype::u8:
            for (std::size_t i = 0; i < count; ++i) {
                const float v = r.values[i];
                if (!(v >= 0.0f && v <= 255.0f) || v != std::floor(v))
                    throw std::runtime_error("u8 raster holds a non-integral or out-of-range value: " +
                                             std::to_string(v));
                bytes[i] = static_cast<unsigned char>(v);
            }
            break;
        case Dtype::u16:
            for (std::size_t i = 0; i < count; ++i) {
                const float v = r.values[i];
                if (!(v >= 0.0f && v <= 65535.0f) || v != std::floor(v))
                    throw std::runtime_error("u16 raster holds a non-integral or out-of-range value: " +
                                             std::to_string(v));
                const std::uint16_t u = static_cast<std::uint16_t>(v);
                bytes[2 * i] = static_cast<unsigned char>(u & 0xff);
                bytes[2 * i + 1] = static_cast<unsigned char>(u >> 8);
            }
            break;
        case Dtype::f32:
            for (std::size_t i = 0; i < count; ++i) {
                const std::uint32_t u = std::bit_cast<std::uint32_t>(r.values[i]);
                bytes[4 * i] = static_cast<unsigned char>(u & 0xff);
                bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
                bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
                bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
            }
            break;
    }
    write_file_bytes(payload_path, bytes.data(), bytes.size());

    json j;
    j["width"] = r.width;
    j["height"] = r.height;
    j["bands"] = r.bands;
    j["dtype"] = dtype_name(r.dtype);
    j["layout"] = "band-sequential";
    j["endianness"] = "little";
    j["data"] = payload_path.filename().string();
    std::ofstream out(descriptor, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open descriptor for writing: " + descriptor.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("failed writing descriptor: " + descriptor.string());
}

}  // namespace

std::string dtype_name(Dtype dt) {
    switch (dt) {
        case Dtype::u8: return "u8";
        case Dtype::u16: return "u16";
        case Dtype::f32: return "f32";
    }
    throw std::logic_error("bad dtype");
}

std::size_t dtype_size(Dtype dt) {
    switch (dt) {
        case Dtype::u8: return 1;
        case Dtype::u16: return 2;
        case Dtype::f32: return 4;
    }
    throw std::logic_error("bad dtype");
}

FeatureVector MultibandRaster::pixel(int row, int col) const {
    FeatureVector x(static_cast<std::size_t>(bands));
    for (int b = 0; b < bands; ++b) x[static_cast<std::size_t>(b)] = at(b, row, col);
    return x;
}

MultibandRaster load_raster(const std::filesystem::path& descriptor) {
    RawRaster raw = load_raw(descriptor);
    if (raw.dtype == Dtype::u16)
        throw std::runtime_error("image rasters must be u8 or f32 (u16 is for label data)");
    MultibandRaster img;
    img.width = raw.width;
    img.height = raw.height;
    img.bands = raw.bands;
    img.dtype = raw.dtype;
    img.data = std::move(raw.values);
    return img;
}

void save_raster(const MultibandRaster& img, const std::filesystem::path& descriptor) {
    const std::size_t expected = static_cast<std::size_t>(img.width) *
                                 static_cast<std::size_t>(img.height) *
                                 static_cast<std::size_t>(img.bands);
    if (img.data.size() != expected) throw std::runtime_error("raster data length mismatch");
    RawRaster raw{img.width, img.height, img.bands, img.dtype, img.data};
    save_raw(raw, descriptor);
}

namespace {

std::vector<std::uint16_t> load_u16_plane(const std::filesystem::path& descriptor, int& width,
                                          int& height) {
    RawRaster raw = load_raw(descriptor);
    if (raw.dtype != Dtype::u16 || raw.bands != 1)
        throw std::runtime_error("label rasters must be single-band u16");
    width = raw.width;
    height = raw.height;
    std::vector<std::uint16_t> labels(raw.values.size());
    for (std::size_t i = 0; i < raw.values.size(); ++i)
        labels[i] = static_cast<std::uint16_t>(raw.values[i]);
    return labels;
}

void save_u16_plane(const std::vector<std::uint16_t>& labels, int width, int height,
                    const std::filesystem::path& descriptor) {
    RawRaster raw;
    raw.width = width;
    raw.height = height;
    raw.bands = 1;
    raw.dtype = Dtype::u16;
    raw.values.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) raw.values[i] = static_cast<float>(labels[i]);
    save_raw(raw, descriptor);
}

}  // namespace

GroundTruth load_ground_truth(const std::filesystem::path& descriptor) {
    GroundTruth gt;
    gt.labels = load_u16_plane(descriptor, gt.width, gt.height);
    std::uint16_t max_label = 0;
    for (std::uint16_t v : gt.labels) max_label = std::max(max_label, v);
    gt.num_classes = max_label;
    return gt;
}

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& descriptor) {
    save_u16_plane(gt.labels, gt.width, gt.height, descriptor);
}

LabelMap load_label_map(const std::filesystem::path& descriptor) {
    LabelMap lm;
    lm.labels = load_u16_plane(descriptor, lm.width, lm.height);
    return lm;
}

void save_label_map(const LabelMap& lm, const std::filesystem::path& descriptor) {
    save_u16_plane(lm.labels, lm.width, lm.height, descriptor);
}

std::vector<LabeledSample> sample_training_set(const MultibandRaster& img, const GroundTruth& gt,
                                               int per_class, std::uint64_t seed) {
    if (img.width != gt.width || img.height != gt.height)
        throw std::invalid_argument("image and ground truth dimensions differ");
    if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
    if (gt.num_classes < 1) throw std::invalid_argument("ground truth has no labeled pixels");

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(gt.num_classes));
    for (std::size_t i = 0; i < gt.labels.size(); ++i)
        if (gt.labels[i] != 0) by_class[static_cast<std::size_t>(gt.labels[i] - 1)].push_back(i);

    Rng rng(seed);
    std::vector<LabeledSample> samples;
    samples.reserve(static_cast<std::size_t>(per_class) * static_cast<std::size_t>(gt.num_classes));
    for (int k = 1; k <= gt.num_classes; ++k) {
        std::vector<std::size_t>& pool = by_class[static_cast<std::size_t>(k - 1)];
        if (pool.size() < static_cast<std::size_t>(per_class))
            throw std::runtime_error("class " + std::to_string(k) + " has only " +
                                     std::to_string(pool.size()) + " labeled pixels, need " +
                                     std::to_string(per_class));
        for (int i = 0; i < per_class; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) +
                rng.uniform_below(pool.size() - static_cast<std::size_t>(i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            const std::size_t idx = pool[static_cast<std::size_t>(i)];
            const int row = static_cast<int>(idx) / img.width;
            const int col = static_cast<int>(idx) % img.width;
            samples.push_back(LabeledSample{img.pixel(row, col), k});
        }
    }
    return samples;
}

void write_training_csv(const std::filesystem::path& path,
                        const std::vector<LabeledSample>& samples, int num_features) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open training CSV for writing: " + path.string());
    for (int j = 1; j <= num_features; ++j) out << "f" << j << ",";
    out << "label\n";
    char buf[64];
    for (const LabeledSample& s : samples) {
        if (s.features.size() != static_cast<std::size_t>(num_features))
            throw std::invalid_argument("sample feature dimension mismatch");
        for (double v : s.features) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ",";
        }
        out << s.label << "\n";
    }
    if (!out) throw std::runtime_error("failed writing training CSV: " + path.string());
}

std::vector<LabeledSample> read_training_csv(const std::filesystem::path& path, int* num_features) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open training CSV: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("training CSV is empty: " + path.string());

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = s.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(s.substr(start));
                break;
            }
            fields.push_back(s.substr(start, comma - start));
            start = comma + 1;
        }
        return fields;
    };

    const std::vector<std::string> header = split(line);
    if (header.size() < 2 || header.back() != "label")
        throw std::runtime_error("training CSV header must be f1,...,fp,label");
    const int p = static_cast<int>(header.size()) - 1;
    for (int j = 0; j < p; ++j)
        if (header[static_cast<std::size_t>(j)] != "f" + std::to_string(j + 1))
            throw std::runtime_error("training CSV header must be f1,...,fp,label");

    std::vector<LabeledSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != static_cast<std::size_t>(p) + 1)
            throw std::runtime_error("training CSV line " + std::to_string(line_no) +
                                     " has wrong field count");
        LabeledSample s;
        s.features.resize(static_cast<std::size_t>(p));
        try {
            for (int j = 0; j < p; ++j)
                s.features[static_cast<std::size_t>(j)] = std::stod(fields[static_cast<std::size_t>(j)]);
            s.label = std::stoi(fields.back());
        } catch (const std::exception&) {
            throw std::runtime_error("training CSV line " + std::to_string(line_no) +
                                     " has a malformed number");
        }
        if (s.label < 1)
            throw std::runtime_error("training CSV line " + std::to_string(line_no) +
                                     " has label < 1");
        samples.push_back(std::move(s));
    }
    if (num_features) *num_features = p;
    return samples;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene spec: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad scene spec " + path.string() + ": " + e.what());
    }
    SceneSpec spec;
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.bands = j.at("bands").get<int>();
    spec.num_classes = j.at("classes").get<int>();
    spec.sites = j.at("sites").get<int>();
    spec.dtype = dtype_from_name(j.value("dtype", std::string("u8")));
    spec.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    spec.pixel_noise_fraction = j.value("pixel_noise_fraction", 0.0);
    for (const json& cm : j.at("class_models")) {
        ClassModel model;
        model.means = cm.at("means").get<std::vector<double>>();
        model.stds = cm.at("stds").get<std::vector<double>>();
        spec.class_models.push_back(std::move(model));
    }
    return spec;
}

std::pair<MultibandRaster, GroundTruth> generate_scene(const SceneSpec& spec) {
    if (spec.num_classes < 2) throw std::invalid_argument("scene needs at least 2 classes");
    if (spec.sites < spec.num_classes)
        throw std::invalid_argument("scene needs at least as many sites as classes");
    if (spec.width < 1 || spec.height < 1 || spec.bands < 1)
        throw std::invalid_argument("scene dimensions must be positive");
    if (spec.class_models.size() != static_cast<std::size_t>(spec.num_classes))
        throw std::invalid_argument("scene needs one class model per class");
    for (const ClassModel& m : spec.class_models) {
        if (m.means.size() != static_cast<std::size_t>(spec.bands) ||
            m.stds.size() != static_cast<std::size_t>(spec.bands))
            throw std::invalid_argument("class model band count mismatch");
        for (double s : m.stds)
            if (!(s > 0.0)) throw std::invalid_argument("class model stds must be positive");
    }
    if (spec.dtype == Dtype::u16) throw std::invalid_argument("scene dtype must be u8 or f32");
    if (spec.pixel_noise_fraction < 0.0 || spec.pixel_noise_fraction > 1.0)
        throw std::invalid_argument("pixel_noise_fraction must lie in [0,1]");

    Rng rng(spec.rng_seed);

    struct Site {
        int row, col, label;
    };
    std::vector<Site> sites;
    sites.reserve(static_cast<std::size_t>(spec.sites));
    for (int i = 0; i < spec.sites; ++i) {
        Site s;
        s.row = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(spec.height)));
        s.col = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(spec.width)));
        s.label = i < spec.num_classes
                      ? i + 1
                      : 1 + static_cast<int>(rng.uniform_below(
                                static_cast<std::uint64_t>(spec.num_classes)));
        sites.push_back(s);
    }

    GroundTruth gt;
    gt.width = spec.width;
    gt.height = spec.height;
    gt.num_classes = spec.num_classes;
    gt.labels.resize(static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height));
    for (int row = 0; row < spec.height; ++row)
        for (int col = 0; col < spec.width; ++col) {
            long long best = std::numeric_limits<long long>::max();
            int label = 1;
            for (const Site& s : sites) {
                const long long dr = row - s.row;
                const long long dc = col - s.col;
                const long long d = dr * dr + dc * dc;
                if (d < best) {
                    best = d;
                    label = s.label;
                }
            }
            gt.labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(spec.width) +
                      static_cast<std::size_t>(col)] = static_cast<std::uint16_t>(label);
        }

    MultibandRaster img;
    img.width = spec.width;
    img.height = spec.height;
    img.bands = spec.bands;
    img.dtype = spec.dtype;
    img.data.resize(gt.labels.size() * static_cast<std::size_t>(spec.bands));
    for (int row = 0; row < spec.height; ++row)
        for (int col = 0; col < spec.width; ++col) {
            int cls = gt.at(row, col);
            if (spec.pixel_noise_fraction > 0.0 && rng.uniform01() < spec.pixel_noise_fraction)
                cls = 1 + static_cast<int>(
                              rng.uniform_below(static_cast<std::uint64_t>(spec.num_classes)));
            const ClassModel& model = spec.class_models[static_cast<std::size_t>(cls - 1)];
            for (int b = 0; b < spec.bands; ++b) {
                const double v = model.means[static_cast<std::size_t>(b)] +
                                 model.stds[static_cast<std::size_t>(b)] * rng.normal();
                float stored;
                if (spec.dtype == Dtype::u8)
                    stored = static_cast<float>(std::clamp<long long>(std::llround(v), 0, 255));
                else
                    stored = static_cast<float>(v);
                img.at(b, row, col) = stored;
            }
        }
    return {std::move(img), std::move(gt)};
}

}  // namespace evfuzz
