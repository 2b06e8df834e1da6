#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace repsim {

/// Labeled grid of similarity scores between two ordered layer sets.
class SimilarityMatrix {
public:
    SimilarityMatrix(std::string metric, std::vector<std::string> row_labels,
                     std::vector<std::string> col_labels, std::vector<double> scores);

    const std::string& metric() const noexcept { return metric_; }
    const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
    const std::vector<std::string>& col_labels() const noexcept { return col_labels_; }
    std::size_t rows() const noexcept { return row_labels_.size(); }
    std::size_t cols() const noexcept { return col_labels_.size(); }
    double operator()(std::size_t r, std::size_t c) const noexcept { return scores_[r * cols() + c]; }
    const std::vector<double>& scores() const noexcept { return scores_; }

private:
    std::string metric_;
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
    std::vector<double> scores_;
};

/// printf("%.9g") with NaN spelled "nan".
std::string format_score(double v);

/// CSV layout: header `metric=<id>,<col labels...>`, then one line per row:
/// `<row label>,<scores...>`. Lines end with '\n'.
std::string to_csv(const SimilarityMatrix& m);
SimilarityMatrix from_csv(const std::string& text);

void write_csv(const std::filesystem::path& path, const SimilarityMatrix& m);
SimilarityMatrix read_csv(const std::filesystem::path& path);

}  // namespace repsim
