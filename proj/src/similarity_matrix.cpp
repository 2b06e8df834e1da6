#include "repsim/similarity_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "repsim/error.hpp"

namespace repsim {

namespace {

void check_label(const std::string& label) {
    if (label.find_first_of(",\"\r\n") != std::string::npos)
        throw InvalidInput("label '" + label + "' contains a CSV delimiter");
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_score(const std::string& cell, std::size_t line_no) {
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v))
        throw FormatError("line " + std::to_string(line_no) + ": bad score '" + cell + "'");
    return v;
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::string metric, std::vector<std::string> row_labels,
                                   std::vector<std::string> col_labels, std::vector<double> scores)
    : metric_(std::move(metric)),
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      scores_(std::move(scores)) {
    if (scores_.size() != row_labels_.size() * col_labels_.size())
        throw InvalidInput("similarity matrix expects " +
                           std::to_string(row_labels_.size() * col_labels_.size()) +
                           " scores, got " + std::to_string(scores_.size()));
}

std::string format_score(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string to_csv(const SimilarityMatrix& m) {
    std::string out = "metric=" + m.metric();
    for (const auto& label : m.col_labels()) {
        check_label(label);
        out += ',' + label;
    }
    out += '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        check_label(m.row_labels()[r]);
        out += m.row_labels()[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out += ',' + format_score(m(r, c));
        out += '\n';
    }
    return out;
}

SimilarityMatrix from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty similarity CSV");
    auto header = split_line(line);
    if (header.front().rfind("metric=", 0) != 0)
        throw FormatError("first CSV cell must be 'metric=<id>', got '" + header.front() + "'");
    std::string metric = header.front().substr(7);
    std::vector<std::string> cols(header.begin() + 1, header.end());

    std::vector<std::string> rows;
    std::vector<double> scores;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != cols.size() + 1)
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(cols.size() + 1) + " cells, got " +
                              std::to_string(cells.size()));
        rows.push_back(cells.front());
        for (std::size_t c = 1; c < cells.size(); ++c) scores.push_back(parse_score(cells[c], line_no));
    }
    return SimilarityMatrix(std::move(metric), std::move(rows), std::move(cols), std::move(scores));
}

void write_csv(const std::filesystem::path& path, const SimilarityMatrix& m) {
    const std::string text = to_csv(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

SimilarityMatrix read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_csv(buf.str());
}

}  // namespace repsim
