#include "repsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "omp_util.hpp"
#include "repsim/error.hpp"

namespace repsim {

namespace {

void require_paired(const DataMatrix& x, const DataMatrix& y) {
    if (x.n_obs() != y.n_obs())
        throw ShapeMismatch("row counts differ: " + std::to_string(x.n_obs()) + " vs " +
                            std::to_string(y.n_obs()));
}

void require_observations(const DataMatrix& x) {
    if (x.n_obs() < 2)
        throw DegenerateInput("similarity needs at least 2 observations, got " +
                              std::to_string(x.n_obs()));
}

// sqrt(a * b), exact for a == b. Falls back to the factored form when the
// product leaves the normal range.
double geometric_norm(double a, double b) {
    const double prod = a * b;
    if (std::isfinite(prod) && prod >= std::numeric_limits<double>::min()) return std::sqrt(prod);
    return std::sqrt(a) * std::sqrt(b);
}

}  // namespace

std::string_view metric_id(Metric m) noexcept {
    switch (m) {
        case Metric::rv: return "rv";
        case Metric::rv2: return "rv2";
        case Metric::linear_cka: return "linear_cka";
    }
    return "rv2";
}

std::optional<Metric> parse_metric(std::string_view id) noexcept {
    if (id == "rv") return Metric::rv;
    if (id == "rv2") return Metric::rv2;
    if (id == "linear_cka" || id == "cka") return Metric::linear_cka;
    return std::nullopt;
}

DataMatrix center_columns(const DataMatrix& m) {
    const std::size_t n = m.n_obs();
    const std::size_t p = m.n_feat();
    std::vector<double> mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        for (std::size_t k = 0; k < p; ++k) mean[k] += row[k];
    }
    for (double& v : mean) v /= static_cast<double>(n);

    std::vector<double> out(m.values().begin(), m.values().end());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k) out[i * p + k] -= mean[k];
    return DataMatrix(n, p, std::move(out), m.label());
}

CrossStats cross_gram_stats(const DataMatrix& x, const DataMatrix& y, StatsPath path) {
    require_paired(x, y);
    if (path == StatsPath::automatic)
        path = x.n_obs() > std::max(x.n_feat(), y.n_feat()) ? StatsPath::feature_space
                                                            : StatsPath::gram_space;
    return path == StatsPath::feature_space ? kernels::feature_space_stats(x, y)
                                            : kernels::gram_space_stats(x, y);
}

double rv(const DataMatrix& x, const DataMatrix& y) {
    require_paired(x, y);
    require_observations(x);
    const CrossStats s = cross_gram_stats(x, y);
    if (s.sxx == 0.0 || s.syy == 0.0)
        throw DegenerateInput("rv undefined: an input matrix is all zero");
    return s.t_cross / geometric_norm(s.sxx, s.syy);
}

double rv2(const DataMatrix& x, const DataMatrix& y) {
    require_paired(x, y);
    require_observations(x);
    const CrossStats s = cross_gram_stats(x, y);
    const double off_x = s.sxx - s.dxx;
    const double off_y = s.syy - s.dyy;
    if (off_x <= 0.0 || off_y <= 0.0)
        throw DegenerateInput("rv2 undefined: a Gram matrix has an all-zero off-diagonal "
                              "(mutually orthogonal observations)");
    return (s.t_cross - s.d_diag) / geometric_norm(off_x, off_y);
}

double linear_cka(const DataMatrix& x, const DataMatrix& y) {
    require_paired(x, y);
    return rv(center_columns(x), center_columns(y));
}

double compute_metric(Metric metric, const DataMatrix& x, const DataMatrix& y, bool center) {
    switch (metric) {
        case Metric::linear_cka: return linear_cka(x, y);
        case Metric::rv: return center ? rv(center_columns(x), center_columns(y)) : rv(x, y);
        case Metric::rv2: return center ? rv2(center_columns(x), center_columns(y)) : rv2(x, y);
    }
    throw Error("unknown metric");
}

PairwiseResult pairwise_similarity(const ActivationSet& a, const ActivationSet& b, Metric metric,
                                   const PairwiseOptions& options) {
    if (a.n_obs() != b.n_obs())
        throw ShapeMismatch("probe sets differ in size: " + std::to_string(a.n_obs()) + " vs " +
                            std::to_string(b.n_obs()) + " observations");
    const std::size_t rows = a.size();
    const std::size_t cols = b.size();
    std::vector<double> scores(rows * cols, 0.0);
    std::vector<unsigned char> degenerate(rows * cols, 0);
    const auto cells = static_cast<std::ptrdiff_t>(rows * cols);
    const int jobs = detail::resolve_jobs(options.jobs);

#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
        const auto i = static_cast<std::size_t>(c) / cols;
        const auto j = static_cast<std::size_t>(c) % cols;
        try {
            scores[static_cast<std::size_t>(c)] =
                compute_metric(metric, a.layers()[i], b.layers()[j], options.center);
        } catch (const DegenerateInput&) {
            scores[static_cast<std::size_t>(c)] = std::numeric_limits<double>::quiet_NaN();
            degenerate[static_cast<std::size_t>(c)] = 1;
        }
    }

    const auto bad = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
    return {SimilarityMatrix(std::string(metric_id(metric)), a.names(), b.names(), std::move(scores)),
            bad};
}

}  // namespace repsim
