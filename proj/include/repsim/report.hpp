#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "repsim/similarity_matrix.hpp"

namespace repsim {

/// Row-argmax placement relative to the diagonal of a cross-network matrix.
struct DiagonalStats {
    std::vector<std::size_t> argmax_col;  ///< per row; NaN cells are skipped
    std::vector<std::size_t> distance;    ///< |row - argmax_col|
    double mean_distance = 0.0;
    double fraction_within_one = 0.0;     ///< rows with distance <= 1
};

/// Rows whose scores are all NaN are excluded from the summary fields and
/// reported with argmax_col == cols().
DiagonalStats diagonal_stats(const SimilarityMatrix& m);

/// Row index with the smallest diagonal score (the layer that differs most
/// between two nets of identical architecture). Requires a square matrix
/// with at least one non-NaN diagonal entry.
std::size_t weakest_diagonal(const SimilarityMatrix& m);

/// Idealized similarity between a random_above(n) net (rows) and the fully
/// trained net (columns) under the hypothesis that the trained layers share
/// the full net's transformations evenly: random layers sit at input depth,
/// trained layer k sits at depth (k - n) * L / (L - n), and the score falls
/// off linearly over two layers of depth mismatch.
SimilarityMatrix hypothesis_matrix(const std::vector<std::string>& labels, std::size_t n_random);

}  // namespace repsim
