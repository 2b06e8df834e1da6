#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace repsim {

/// Dense row-major matrix of 64-bit floats: n_obs observations (rows) by
/// n_feat features (columns). Entries are validated finite on construction
/// and the object is immutable afterwards.
class DataMatrix {
public:
    /// Throws InvalidInput if an extent is zero, the value count does not
    /// match, or any entry is NaN/Inf.
    DataMatrix(std::size_t n_obs, std::size_t n_feat, std::vector<double> values,
               std::string label = {});

    /// Row-list convenience constructor, mostly for tests and small inputs.
    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                std::string label = {});

    std::size_t n_obs() const noexcept { return n_obs_; }
    std::size_t n_feat() const noexcept { return n_feat_; }
    const std::string& label() const noexcept { return label_; }

    double operator()(std::size_t row, std::size_t col) const noexcept {
        return values_[row * n_feat_ + col];
    }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * n_feat_, n_feat_};
    }
    std::span<const double> values() const noexcept { return values_; }

    DataMatrix with_label(std::string label) const;

    friend bool operator==(const DataMatrix& a, const DataMatrix& b) {
        return a.n_obs_ == b.n_obs_ && a.n_feat_ == b.n_feat_ && a.values_ == b.values_;
    }

private:
    std::size_t n_obs_;
    std::size_t n_feat_;
    std::vector<double> values_;
    std::string label_;
};

}  // namespace repsim
