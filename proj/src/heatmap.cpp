#include "repsim/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>

#include "repsim/error.hpp"

namespace repsim {

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

std::string printf_string(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    const int len = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(static_cast<std::size_t>(len) + 1, '\0');
    std::vsnprintf(out.data(), out.size(), fmt, args);
    va_end(args);
    out.pop_back();
    return out;
}

std::size_t longest(const std::vector<std::string>& labels) {
    std::size_t n = 0;
    for (const auto& l : labels) n = std::max(n, l.size());
    return n;
}

}  // namespace

std::size_t palette_index(double score, double lo, double hi) {
    const double v = std::strtod(format_score(score).c_str(), nullptr);
    const double t = (std::clamp(v, lo, hi) - lo) / (hi - lo);
    const auto idx = static_cast<long>(std::floor(t * 255.0 + 0.5));
    return static_cast<std::size_t>(std::clamp(idx, 0L, 255L));
}

std::string render_heatmap_svg(const SimilarityMatrix& m, const HeatmapStyle& style) {
    if (!(style.lo < style.hi)) throw InvalidInput("heatmap range needs lo < hi");
    if (style.cell_px <= 0) throw InvalidInput("heatmap cell size must be positive");

    const int cell = style.cell_px;
    const int char_px = 7;
    const int left = style.show_labels ? static_cast<int>(longest(m.row_labels())) * char_px + 12 : 8;
    const int top = (style.show_labels ? static_cast<int>(longest(m.col_labels())) * char_px + 12 : 8) +
                    (style.title.empty() ? 0 : 22);
    const int grid_w = cell * static_cast<int>(m.cols());
    const int grid_h = cell * static_cast<int>(m.rows());
    const int bar_x = left + grid_w + 16;
    const int bar_w = 14;
    const int width = bar_x + bar_w + 70;
    const int height = top + std::max(grid_h, 120) + 12;
    const auto& palette = heatmap_palette();

    std::string svg;
    auto line = [&](const std::string& s) { svg += s + '\n'; };

    line(R"(<?xml version="1.0" encoding="UTF-8"?>)");
    line(printf_string(R"(<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d" font-family="sans-serif" font-size="11">)",
                       width, height, width, height));
    line("<defs>");
    line(R"svg(<pattern id="nan-hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">)svg");
    line(R"(<rect width="6" height="6" fill="#bdbdbd"/><line x1="0" y1="0" x2="0" y2="6" stroke="#6e6e6e" stroke-width="2"/>)");
    line("</pattern>");
    line("</defs>");
    line(R"(<rect width="100%" height="100%" fill="#ffffff"/>)");
    if (!style.title.empty())
        line(R"(<text x="4" y="16" font-size="13">)" + escape_xml(style.title) + "</text>");

    line(R"(<g id="cells" data-metric=")" + escape_xml(m.metric()) + R"(">)");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            const int x = left + cell * static_cast<int>(c);
            const int y = top + cell * static_cast<int>(r);
            const std::string tip = "<title>" + escape_xml(m.row_labels()[r]) + " / " +
                                    escape_xml(m.col_labels()[c]) + ": " + format_score(v) +
                                    "</title></rect>";
            if (std::isnan(v)) {
                line(printf_string(R"svg(<rect class="nan" x="%d" y="%d" width="%d" height="%d" fill="url(#nan-hatch)" data-row="%zu" data-col="%zu">)svg",
                                   x, y, cell, cell, r, c) + tip);
            } else {
                const std::size_t idx = palette_index(v, style.lo, style.hi);
                line(printf_string(R"(<rect x="%d" y="%d" width="%d" height="%d" fill="%s" data-row="%zu" data-col="%zu" data-palette-index="%zu">)",
                                   x, y, cell, cell, hex(palette[idx]).c_str(), r, c, idx) + tip);
            }
        }
    }
    line("</g>");

    if (style.show_labels) {
        line(R"(<g id="row-labels" text-anchor="end">)");
        for (std::size_t r = 0; r < m.rows(); ++r)
            line(printf_string(R"(<text x="%d" y="%d" dominant-baseline="middle">)", left - 6,
                               top + cell * static_cast<int>(r) + cell / 2) +
                 escape_xml(m.row_labels()[r]) + "</text>");
        line("</g>");
        line(R"(<g id="col-labels" text-anchor="start">)");
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const int x = left + cell * static_cast<int>(c) + cell / 2;
            line(printf_string(R"svg(<text x="%d" y="%d" transform="rotate(-90 %d %d)" dominant-baseline="middle">)svg",
                               x, top - 6, x, top - 6) +
                 escape_xml(m.col_labels()[c]) + "</text>");
        }
        line("</g>");
    }

    // Colorbar: 16 bands from hi (top) to lo (bottom).
    line(R"(<g id="colorbar">)");
    const int bands = 16;
    const int band_h = 120 / bands;
    for (int b = 0; b < bands; ++b) {
        const auto idx = static_cast<std::size_t>(255 - (b * 255) / (bands - 1));
        line(printf_string(R"(<rect x="%d" y="%d" width="%d" height="%d" fill="%s"/>)", bar_x,
                           top + b * band_h, bar_w, band_h, hex(palette[idx]).c_str()));
    }
    line(printf_string(R"(<text x="%d" y="%d" dominant-baseline="hanging">%s</text>)",
                       bar_x + bar_w + 4, top, format_score(style.hi).c_str()));
    line(printf_string(R"(<text x="%d" y="%d">%s</text>)", bar_x + bar_w + 4, top + bands * band_h,
                       format_score(style.lo).c_str()));
    line("</g>");
    line("</svg>");
    return svg;
}

}  // namespace repsim
