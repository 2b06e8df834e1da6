#include "repsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repsim/error.hpp"

namespace repsim {

DiagonalStats diagonal_stats(const SimilarityMatrix& m) {
    DiagonalStats s;
    std::size_t counted = 0, near = 0, total = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::size_t best = m.cols();
        double best_v = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            if (!std::isnan(v) && v > best_v) {
                best_v = v;
                best = c;
            }
        }
        s.argmax_col.push_back(best);
        const std::size_t d = best == m.cols() ? 0 : (best > r ? best - r : r - best);
        s.distance.push_back(d);
        if (best == m.cols()) continue;
        ++counted;
        total += d;
        near += d <= 1;
    }
    if (counted > 0) {
        s.mean_distance = static_cast<double>(total) / static_cast<double>(counted);
        s.fraction_within_one = static_cast<double>(near) / static_cast<double>(counted);
    }
    return s;
}

std::size_t weakest_diagonal(const SimilarityMatrix& m) {
    if (m.rows() != m.cols()) throw ShapeMismatch("weakest_diagonal needs a square matrix");
    std::size_t worst = m.rows();
    double worst_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double v = m(i, i);
        if (!std::isnan(v) && v < worst_v) {
            worst_v = v;
            worst = i;
        }
    }
    if (worst == m.rows()) throw DegenerateInput("matrix diagonal is entirely NaN");
    return worst;
}

SimilarityMatrix hypothesis_matrix(const std::vector<std::string>& labels, std::size_t n_random) {
    const std::size_t layers = labels.size();
    if (n_random >= layers) throw ConfigError("hypothesis needs at least one trained layer");
    std::vector<double> scores(layers * layers);
    for (std::size_t k = 1; k <= layers; ++k) {
        const double depth =
            k <= n_random ? 0.0
                          : static_cast<double>(k - n_random) * static_cast<double>(layers) /
                                static_cast<double>(layers - n_random);
        for (std::size_t i = 1; i <= layers; ++i)
            scores[(k - 1) * layers + (i - 1)] =
                std::max(0.0, 1.0 - std::abs(depth - static_cast<double>(i)) / 2.0);
    }
    return SimilarityMatrix("hypothesis", labels, labels, std::move(scores));
}

}  // namespace repsim
