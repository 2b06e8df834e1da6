#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "repsim/activation_set.hpp"
#include "repsim/data_matrix.hpp"
#include "repsim/kernels.hpp"
#include "repsim/similarity_matrix.hpp"

namespace repsim {

enum class Metric { rv, rv2, linear_cka };

/// Canonical identifier used in CSV headers: "rv", "rv2", "linear_cka".
std::string_view metric_id(Metric m) noexcept;
/// Accepts the canonical ids plus the short alias "cka".
std::optional<Metric> parse_metric(std::string_view id) noexcept;

enum class StatsPath { automatic, feature_space, gram_space };

/// Subtracts each column's mean. Keeps the label.
DataMatrix center_columns(const DataMatrix& m);

/// Evaluates the six Gram trace statistics. `automatic` picks the feature
/// space when n_obs > max(p, q). Throws ShapeMismatch on differing row counts.
CrossStats cross_gram_stats(const DataMatrix& x, const DataMatrix& y,
                            StatsPath path = StatsPath::automatic);

/// RV coefficient: tr(XX'YY') / sqrt(tr[(XX')^2] tr[(YY')^2]).
/// Inputs are used as given, no centering.
double rv(const DataMatrix& x, const DataMatrix& y);

/// Modified RV: the same normalized inner product with the Gram diagonals
/// removed. Throws DegenerateInput when either Gram has an all-zero
/// off-diagonal part; the metric is undefined there, not zero.
double rv2(const DataMatrix& x, const DataMatrix& y);

/// Linear CKA, computed as rv(center_columns(x), center_columns(y)).
double linear_cka(const DataMatrix& x, const DataMatrix& y);

/// Dispatches on `metric`. With `center` set, rv and rv2 see column-centered
/// inputs; linear_cka always centers.
double compute_metric(Metric metric, const DataMatrix& x, const DataMatrix& y, bool center = false);

struct PairwiseOptions {
    bool center = false;
    int jobs = 0;  ///< worker threads; 0 = OpenMP default
};

struct PairwiseResult {
    SimilarityMatrix matrix;
    std::size_t degenerate_cells = 0;  ///< cells recorded as NaN
};

/// scores(i, j) = metric(a.layers[i], b.layers[j]). Cells whose metric is
/// undefined are stored as NaN and counted. Throws ShapeMismatch when the
/// two sets were measured on probe sets of different size.
PairwiseResult pairwise_similarity(const ActivationSet& a, const ActivationSet& b, Metric metric,
                                   const PairwiseOptions& options = {});

}  // namespace repsim
