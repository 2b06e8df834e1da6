#include "repsim/activation_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "repsim/error.hpp"

namespace repsim {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'A', 'M'};

template <typename T>
void put_le(std::string& out, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                       std::uint8_t>>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const unsigned char* p) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                       std::uint8_t>>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(U(p[i]) << (8 * i));
    return std::bit_cast<T>(bits);
}

struct RsamArray {
    std::vector<std::size_t> dims;
    std::vector<double> values;
};

void write_rsam(const std::filesystem::path& path, const std::vector<std::size_t>& dims,
                const std::vector<double>& values, DType dtype) {
    std::string bytes(kMagic, 4);
    put_le<std::uint16_t>(bytes, kRsamVersion);
    put_le<std::uint8_t>(bytes, static_cast<std::uint8_t>(dtype));
    put_le<std::uint8_t>(bytes, static_cast<std::uint8_t>(dims.size()));
    for (std::size_t d : dims) put_le<std::uint64_t>(bytes, d);
    bytes.reserve(bytes.size() + values.size() * (dtype == DType::f64 ? 8 : 4));
    for (double v : values) {
        if (dtype == DType::f64)
            put_le<double>(bytes, v);
        else
            put_le<float>(bytes, static_cast<float>(v));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

RsamArray read_rsam(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    const std::string where = "'" + path.string() + "': ";

    constexpr std::size_t kFixedHeader = 8;
    if (raw.size() < kFixedHeader)
        throw FormatError(where + "truncated header (" + std::to_string(raw.size()) + " bytes)");
    if (std::memcmp(p, kMagic, 4) != 0) throw FormatError(where + "bad magic, not an RSAM file");
    const auto version = get_le<std::uint16_t>(p + 4);
    if (version != kRsamVersion)
        throw FormatError(where + "unsupported RSAM version " + std::to_string(version));
    const auto dtype = p[6];
    if (dtype != static_cast<unsigned char>(DType::f32) && dtype != static_cast<unsigned char>(DType::f64))
        throw FormatError(where + "unknown dtype code " + std::to_string(dtype));
    const std::size_t ndim = p[7];
    if (ndim != 2 && ndim != 4) throw FormatError(where + "ndim must be 2 or 4, got " + std::to_string(ndim));

    const std::size_t header = kFixedHeader + 8 * ndim;
    if (raw.size() < header)
        throw FormatError(where + "truncated header: expected " + std::to_string(header) +
                          " bytes, got " + std::to_string(raw.size()));
    RsamArray arr;
    std::size_t count = 1;
    for (std::size_t d = 0; d < ndim; ++d) {
        const auto extent = get_le<std::uint64_t>(p + kFixedHeader + 8 * d);
        if (extent == 0) throw FormatError(where + "zero extent in dimension " + std::to_string(d));
        if (count > (std::size_t(1) << 60) / extent) throw FormatError(where + "extents overflow");
        count *= extent;
        arr.dims.push_back(extent);
    }

    const std::size_t width = dtype == static_cast<unsigned char>(DType::f64) ? 8 : 4;
    const std::size_t expected = count * width;
    const std::size_t actual = raw.size() - header;
    if (actual != expected)
        throw FormatError(where + (actual < expected ? "truncated payload" : "trailing bytes") +
                          ": expected " + std::to_string(expected) + " payload bytes, got " +
                          std::to_string(actual));

    arr.values.resize(count);
    const unsigned char* payload = p + header;
    for (std::size_t i = 0; i < count; ++i) {
        const double v = width == 8 ? get_le<double>(payload + 8 * i)
                                    : static_cast<double>(get_le<float>(payload + 4 * i));
        if (!std::isfinite(v))
            throw FormatError(where + "non-finite value at element " + std::to_string(i));
        arr.values[i] = v;
    }
    return arr;
}

std::string safe_component(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
    return out;
}

}  // namespace

ActivationTensor::ActivationTensor(Extents dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
    std::size_t count = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw InvalidInput("activation tensor extents must be positive");
        count *= d;
    }
    if (values_.size() != count)
        throw InvalidInput("activation tensor expects " + std::to_string(count) + " values, got " +
                           std::to_string(values_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidInput("activation tensor has a non-finite entry");
}

DataMatrix global_average_pool(const ActivationTensor& t) {
    const std::size_t area = t.height() * t.width();
    const std::size_t maps = t.frames() * t.channels();
    std::vector<double> out(maps);
    const double* src = t.values().data();
    for (std::size_t m = 0; m < maps; ++m) {
        if (area == 1) {
            out[m] = src[m];
            continue;
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < area; ++k) acc += src[m * area + k];
        out[m] = acc / static_cast<double>(area);
    }
    return DataMatrix(t.frames(), t.channels(), std::move(out));
}

DataMatrix decimate(const DataMatrix& m, std::size_t factor) {
    if (factor == 0) throw ConfigError("decimation factor must be at least 1");
    if (m.n_obs() < factor)
        throw EmptyResult("cannot decimate " + std::to_string(m.n_obs()) + " rows by factor " +
                          std::to_string(factor));
    const std::size_t kept = (m.n_obs() + factor - 1) / factor;
    std::vector<double> out;
    out.reserve(kept * m.n_feat());
    for (std::size_t r = 0; r < m.n_obs(); r += factor) {
        const auto row = m.row(r);
        out.insert(out.end(), row.begin(), row.end());
    }
    return DataMatrix(kept, m.n_feat(), std::move(out), m.label());
}

ActivationTensor decimate_frames(const ActivationTensor& t, std::size_t factor) {
    if (factor == 0) throw ConfigError("decimation factor must be at least 1");
    if (t.frames() < factor)
        throw EmptyResult("cannot decimate " + std::to_string(t.frames()) + " frames by factor " +
                          std::to_string(factor));
    const std::size_t frame_size = t.channels() * t.height() * t.width();
    auto dims = t.dims();
    dims[0] = (t.frames() + factor - 1) / factor;
    std::vector<double> out;
    out.reserve(dims[0] * frame_size);
    for (std::size_t f = 0; f < t.frames(); f += factor) {
        const auto first = t.values().begin() + static_cast<std::ptrdiff_t>(f * frame_size);
        out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(frame_size));
    }
    return ActivationTensor(dims, std::move(out));
}

void write_matrix(const std::filesystem::path& path, const DataMatrix& m, DType dtype) {
    write_rsam(path, {m.n_obs(), m.n_feat()}, {m.values().begin(), m.values().end()}, dtype);
}

DataMatrix read_matrix(const std::filesystem::path& path) {
    auto arr = read_rsam(path);
    if (arr.dims.size() != 2)
        throw FormatError("'" + path.string() + "': expected a 2-D matrix, found ndim " +
                          std::to_string(arr.dims.size()));
    return DataMatrix(arr.dims[0], arr.dims[1], std::move(arr.values));
}

void write_tensor(const std::filesystem::path& path, const ActivationTensor& t, DType dtype) {
    write_rsam(path, {t.dims().begin(), t.dims().end()}, t.values(), dtype);
}

ActivationTensor read_tensor(const std::filesystem::path& path) {
    auto arr = read_rsam(path);
    ActivationTensor::Extents dims{arr.dims[0], arr.dims[1], 1, 1};
    if (arr.dims.size() == 4) dims = {arr.dims[0], arr.dims[1], arr.dims[2], arr.dims[3]};
    return ActivationTensor(dims, std::move(arr.values));
}

ActivationSet load_activation_set(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ManifestError("cannot open manifest '" + manifest_path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError("manifest '" + manifest_path.string() + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("probe_id") || !doc["probe_id"].is_string() ||
        !doc.contains("layers") || !doc["layers"].is_array())
        throw ManifestError("manifest needs a string 'probe_id' and an array 'layers'");
    if (doc["layers"].empty()) throw ManifestError("manifest lists no layers");

    const auto base = manifest_path.parent_path();
    std::vector<DataMatrix> layers;
    std::set<std::string> seen;
    for (const auto& entry : doc["layers"]) {
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string() ||
            !entry.contains("path") || !entry["path"].is_string())
            throw ManifestError("every layer entry needs string 'name' and 'path'");
        const auto name = entry["name"].get<std::string>();
        if (name.empty()) throw ManifestError("empty layer name");
        if (!seen.insert(name).second) throw ManifestError("duplicate layer name '" + name + "'");

        std::filesystem::path file = entry["path"].get<std::string>();
        if (file.is_relative()) file = base / file;
        if (!std::filesystem::exists(file))
            throw ManifestError("layer '" + name + "': missing file '" + file.string() + "'");

        const ActivationTensor t = read_tensor(file);
        DataMatrix m = global_average_pool(t).with_label(name);
        if (!layers.empty() && m.n_obs() != layers.front().n_obs())
            throw ManifestError("layer '" + name + "' has " + std::to_string(m.n_obs()) +
                                " rows but '" + layers.front().label() + "' has " +
                                std::to_string(layers.front().n_obs()));
        layers.push_back(std::move(m));
    }
    return ActivationSet(std::move(layers), doc["probe_id"].get<std::string>());
}

std::filesystem::path save_activation_set(const ActivationSet& set, const std::filesystem::path& dir,
                                          const std::string& stem) {
    std::filesystem::create_directories(dir);
    nlohmann::json doc;
    doc["probe_id"] = set.probe_id();
    doc["layers"] = nlohmann::json::array();
    for (const auto& layer : set.layers()) {
        const std::string file = stem + "." + safe_component(layer.label()) + ".rsam";
        write_matrix(dir / file, layer);
        doc["layers"].push_back({{"name", layer.label()}, {"path", file}});
    }
    const auto manifest = dir / (stem + ".json");
    std::ofstream out(manifest, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + manifest.string() + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + manifest.string() + "'");
    return manifest;
}

}  // namespace repsim
