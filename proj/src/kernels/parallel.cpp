#include <algorithm>
#include <cstddef>
#include <vector>

#include "repsim/kernels.hpp"

namespace repsim::kernels {

namespace {

constexpr std::size_t kLeafSize = 32;
constexpr std::size_t kFeatureBlock = 8;
constexpr std::size_t kGramTile = 64;

template <typename F>
double cascade(std::size_t begin, std::size_t end, const F& term) {
    const std::size_t len = end - begin;
    if (len <= kLeafSize) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) acc += term(i);
        return acc;
    }
    const std::size_t mid = begin + len / 2;
    return cascade(begin, mid, term) + cascade(mid, end, term);
}

// C = A'B for row-major A (n x p), B (n x q). Each C[a][b] is a sequential
// sum over rows, independent of how column blocks are scheduled.
std::vector<double> cross_product(const DataMatrix& a, const DataMatrix& b) {
    const std::size_t n = a.n_obs();
    const std::size_t p = a.n_feat();
    const std::size_t q = b.n_feat();
    std::vector<double> c(p * q, 0.0);
    const auto n_blocks = static_cast<std::ptrdiff_t>((p + kFeatureBlock - 1) / kFeatureBlock);
    const double* av = a.values().data();
    const double* bv = b.values().data();

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t blk = 0; blk < n_blocks; ++blk) {
        const std::size_t a0 = static_cast<std::size_t>(blk) * kFeatureBlock;
        const std::size_t a1 = std::min(p, a0 + kFeatureBlock);
        double* out = c.data() + a0 * q;
        for (std::size_t i = 0; i < n; ++i) {
            const double* brow = bv + i * q;
            const double* arow = av + i * p;
            for (std::size_t col = a0; col < a1; ++col) {
                const double s = arow[col];
                double* dst = out + (col - a0) * q;
                for (std::size_t k = 0; k < q; ++k) dst[k] += s * brow[k];
            }
        }
    }
    return c;
}

double frobenius_sq(const std::vector<double>& m) {
    return cascade(0, m.size(), [&](std::size_t i) { return m[i] * m[i]; });
}

// Orders the operands so that the feature-space evaluation of (x, y) and
// (y, x) runs the identical sequence of floating-point operations.
bool canonical_swap(const DataMatrix& x, const DataMatrix& y) {
    if (x.n_feat() != y.n_feat()) return x.n_feat() > y.n_feat();
    const auto xv = x.values();
    const auto yv = y.values();
    return std::lexicographical_compare(yv.begin(), yv.end(), xv.begin(), xv.end());
}

CrossStats swapped(const CrossStats& s) {
    return {s.t_cross, s.d_diag, s.syy, s.dyy, s.sxx, s.dxx};
}

void fill_diagonal_terms(const DataMatrix& x, const DataMatrix& y, CrossStats& s) {
    const auto gx = row_sq_norms(x);
    const auto gy = row_sq_norms(y);
    s.d_diag = cascade(0, gx.size(), [&](std::size_t i) { return gx[i] * gy[i]; });
    s.dxx = cascade(0, gx.size(), [&](std::size_t i) { return gx[i] * gx[i]; });
    s.dyy = cascade(0, gy.size(), [&](std::size_t i) { return gy[i] * gy[i]; });
}

// Transposed copy of rows [r0, r1) of m: out[k * tile + (r - r0)].
void transpose_rows(const DataMatrix& m, std::size_t r0, std::size_t r1, std::vector<double>& out) {
    const std::size_t p = m.n_feat();
    const std::size_t w = r1 - r0;
    out.assign(p * kGramTile, 0.0);
    for (std::size_t r = 0; r < w; ++r) {
        const auto row = m.row(r0 + r);
        for (std::size_t k = 0; k < p; ++k) out[k * kGramTile + r] = row[k];
    }
}

// g[j] = <m.row(i), rows of the transposed tile>, summed over features in order.
void gram_row(std::span<const double> row, const std::vector<double>& tile_t, double* g) {
    std::fill(g, g + kGramTile, 0.0);
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double s = row[k];
        const double* src = tile_t.data() + k * kGramTile;
        for (std::size_t j = 0; j < kGramTile; ++j) g[j] += s * src[j];
    }
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return cascade(0, values.size(), [&](std::size_t i) { return values[i]; });
}

std::vector<double> row_sq_norms(const DataMatrix& m) {
    std::vector<double> out(m.n_obs());
    const auto n = static_cast<std::ptrdiff_t>(m.n_obs());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (double v : m.row(static_cast<std::size_t>(i))) acc += v * v;
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

CrossStats feature_space_stats(const DataMatrix& x, const DataMatrix& y) {
    if (canonical_swap(x, y)) return swapped(feature_space_stats(y, x));
    CrossStats s;
    s.t_cross = frobenius_sq(cross_product(x, y));
    s.sxx = frobenius_sq(cross_product(x, x));
    s.syy = frobenius_sq(cross_product(y, y));
    fill_diagonal_terms(x, y, s);
    return s;
}

CrossStats gram_space_stats(const DataMatrix& x, const DataMatrix& y) {
    const std::size_t n = x.n_obs();
    const std::size_t n_tiles = (n + kGramTile - 1) / kGramTile;

    // Per-row sums over j <= i of G_ij H_ij, G_ij^2, H_ij^2, with the
    // strictly-lower entries doubled to account for symmetry.
    std::vector<double> row_t(n, 0.0), row_x(n, 0.0), row_y(n, 0.0);

#pragma omp parallel
    {
        std::vector<double> xt, yt;
        std::vector<double> gx(kGramTile), gy(kGramTile);

#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(n_tiles); ++ti) {
            const std::size_t i0 = static_cast<std::size_t>(ti) * kGramTile;
            const std::size_t i1 = std::min(n, i0 + kGramTile);
            for (std::size_t tj = 0; tj <= static_cast<std::size_t>(ti); ++tj) {
                const std::size_t j0 = tj * kGramTile;
                const std::size_t j1 = std::min(n, j0 + kGramTile);
                transpose_rows(x, j0, j1, xt);
                transpose_rows(y, j0, j1, yt);
                for (std::size_t i = i0; i < i1; ++i) {
                    gram_row(x.row(i), xt, gx.data());
                    gram_row(y.row(i), yt, gy.data());
                    const std::size_t jend = std::min(j1, i + 1);
                    double pt = 0.0, px = 0.0, py = 0.0;
                    for (std::size_t j = j0; j < jend; ++j) {
                        const double a = gx[j - j0];
                        const double b = gy[j - j0];
                        const double w = (j == i) ? 1.0 : 2.0;
                        pt += w * (a * b);
                        px += w * (a * a);
                        py += w * (b * b);
                    }
                    row_t[i] += pt;
                    row_x[i] += px;
                    row_y[i] += py;
                }
            }
        }
    }

    CrossStats s;
    s.t_cross = pairwise_sum(row_t);
    s.sxx = pairwise_sum(row_x);
    s.syy = pairwise_sum(row_y);
    fill_diagonal_terms(x, y, s);
    return s;
}

}  // namespace repsim::kernels
