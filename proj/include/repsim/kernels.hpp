#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "repsim/data_matrix.hpp"

namespace repsim {

/// Trace statistics of the observation Grams G = XX' and H = YY'. Every
/// similarity metric in this library is a closed form in these six numbers.
struct CrossStats {
    double t_cross = 0.0;  ///< tr(GH) = sum_ij G_ij H_ij
    double d_diag = 0.0;   ///< sum_i G_ii H_ii
    double sxx = 0.0;      ///< tr(G^2) = ||G||_F^2
    double dxx = 0.0;      ///< sum_i G_ii^2
    double syy = 0.0;      ///< tr(H^2)
    double dyy = 0.0;      ///< sum_i H_ii^2
};

namespace kernels {

// Parallel kernels. Each output entry and each partial sum is produced by a
// fixed sequence of operations that does not depend on the OpenMP thread
// count, so results are bitwise reproducible across --jobs settings.

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

/// Squared Euclidean norm of every row, i.e. the Gram diagonal.
std::vector<double> row_sq_norms(const DataMatrix& m);

/// Uses tr(XX'YY') = ||X'Y||_F^2 and friends; cost O(n p q), memory O(p q).
CrossStats feature_space_stats(const DataMatrix& x, const DataMatrix& y);

/// Streams tiles of the n x n Grams without materializing them; cost
/// O(n^2 (p + q)), memory O(tile^2).
CrossStats gram_space_stats(const DataMatrix& x, const DataMatrix& y);

/// Serial reference implementations: straightforward loops with left-fold
/// accumulation. Kept for testing and benchmarking the parallel kernels.
namespace serial {

CrossStats feature_space_stats(const DataMatrix& x, const DataMatrix& y);
CrossStats gram_space_stats(const DataMatrix& x, const DataMatrix& y);

}  // namespace serial
}  // namespace kernels
}  // namespace repsim
