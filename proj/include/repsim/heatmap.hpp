#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "repsim/similarity_matrix.hpp"

namespace repsim {

struct Rgb {
    std::uint8_t r, g, b;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Fixed 256-entry palette ordered dark (low) to bright (high).
const std::array<Rgb, 256>& heatmap_palette() noexcept;

struct HeatmapStyle {
    double lo = 0.0;
    double hi = 1.0;
    int cell_px = 28;
    bool show_labels = true;
    std::string title;
};

/// Palette slot for a score after clamping to [lo, hi]. The score is first
/// rounded through its 9-digit CSV spelling so that a heatmap rendered from
/// a parsed CSV is identical to one rendered from the in-memory matrix.
std::size_t palette_index(double score, double lo, double hi);

/// One <rect> per cell, NaN cells hatched gray. Throws InvalidInput unless
/// lo < hi and cell_px > 0. Output depends only on the arguments.
std::string render_heatmap_svg(const SimilarityMatrix& m, const HeatmapStyle& style = {});

}  // namespace repsim
