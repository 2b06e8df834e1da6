#include "repsim/data_matrix.hpp"

#include <cmath>
#include <string>

#include "repsim/error.hpp"

namespace repsim {

DataMatrix::DataMatrix(std::size_t n_obs, std::size_t n_feat, std::vector<double> values,
                       std::string label)
    : n_obs_(n_obs), n_feat_(n_feat), values_(std::move(values)), label_(std::move(label)) {
    if (n_obs_ == 0 || n_feat_ == 0)
        throw InvalidInput("DataMatrix extents must be positive, got " + std::to_string(n_obs_) +
                           "x" + std::to_string(n_feat_));
    if (values_.size() != n_obs_ * n_feat_)
        throw InvalidInput("DataMatrix expects " + std::to_string(n_obs_ * n_feat_) +
                           " values, got " + std::to_string(values_.size()));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw InvalidInput("non-finite entry at row " + std::to_string(i / n_feat_) +
                               ", column " + std::to_string(i % n_feat_));
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows, std::string label) {
    if (rows.empty() || rows.front().empty())
        throw InvalidInput("DataMatrix::from_rows needs at least one non-empty row");
    const std::size_t cols = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw InvalidInput("ragged rows in DataMatrix::from_rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return DataMatrix(rows.size(), cols, std::move(flat), std::move(label));
}

DataMatrix DataMatrix::with_label(std::string label) const {
    DataMatrix copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

}  // namespace repsim
