#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "repsim/activation_set.hpp"
#include "repsim/data_matrix.hpp"

namespace repsim {

enum class DType : std::uint8_t { f32 = 1, f64 = 2 };

/// Layer activations laid out frames x channels x height x width, row-major.
/// Fully-connected layers use height = width = 1. Values are held as f64
/// regardless of the on-disk dtype.
class ActivationTensor {
public:
    using Extents = std::array<std::size_t, 4>;

    /// Throws InvalidInput on zero extents, size mismatch or non-finite values.
    ActivationTensor(Extents dims, std::vector<double> values);

    const Extents& dims() const noexcept { return dims_; }
    std::size_t frames() const noexcept { return dims_[0]; }
    std::size_t channels() const noexcept { return dims_[1]; }
    std::size_t height() const noexcept { return dims_[2]; }
    std::size_t width() const noexcept { return dims_[3]; }
    const std::vector<double>& values() const noexcept { return values_; }

    double at(std::size_t f, std::size_t c, std::size_t h, std::size_t w) const noexcept {
        return values_[((f * dims_[1] + c) * dims_[2] + h) * dims_[3] + w];
    }

private:
    Extents dims_;
    std::vector<double> values_;
};

/// frames x channels matrix of per-map spatial means.
DataMatrix global_average_pool(const ActivationTensor& t);

/// Stride sampling: keeps rows 0, factor, 2*factor, ... Throws ConfigError
/// for factor 0 and EmptyResult when factor exceeds the row count.
DataMatrix decimate(const DataMatrix& m, std::size_t factor);

/// The same stride sampling applied along the frame axis of a tensor.
ActivationTensor decimate_frames(const ActivationTensor& t, std::size_t factor);

// RSAM binary format, little-endian:
//   "RSAM" | u16 version=1 | u8 dtype (1=f32, 2=f64) | u8 ndim (2 or 4)
//   | ndim x u64 extents | row-major payload
inline constexpr std::uint16_t kRsamVersion = 1;

void write_matrix(const std::filesystem::path& path, const DataMatrix& m, DType dtype = DType::f64);
/// Reads a 2-D RSAM file. f32 payloads are widened. The label is left empty.
DataMatrix read_matrix(const std::filesystem::path& path);

void write_tensor(const std::filesystem::path& path, const ActivationTensor& t,
                  DType dtype = DType::f64);
/// Reads a 4-D RSAM file; a 2-D file is returned as frames x channels x 1 x 1.
ActivationTensor read_tensor(const std::filesystem::path& path);

/// Loads the manifest (JSON: probe_id + ordered [{name, path}]) and each
/// referenced RSAM file. Relative paths resolve against the manifest's
/// directory. 4-D layers are globally average-pooled on load.
ActivationSet load_activation_set(const std::filesystem::path& manifest_path);

/// Writes one RSAM file per layer as `<stem>.<layer>.rsam` next to a
/// `<stem>.json` manifest inside `dir`. Returns the manifest path.
std::filesystem::path save_activation_set(const ActivationSet& set, const std::filesystem::path& dir,
                                          const std::string& stem);

}  // namespace repsim
