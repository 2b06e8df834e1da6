#pragma once

// Test-only reference computations. Everything here goes through explicit
// n x n Gram matrices built with Eigen, independent of the library kernels.

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "repsim/data_matrix.hpp"

namespace oracle {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Mat to_eigen(const repsim::DataMatrix& m) {
    Mat out(m.n_obs(), m.n_feat());
    for (std::size_t i = 0; i < m.n_obs(); ++i)
        for (std::size_t j = 0; j < m.n_feat(); ++j) out(i, j) = m(i, j);
    return out;
}

inline repsim::DataMatrix from_eigen(const Mat& m) {
    std::vector<double> v(m.data(), m.data() + m.size());
    return repsim::DataMatrix(m.rows(), m.cols(), std::move(v));
}

struct Stats {
    double t_cross, d_diag, sxx, dxx, syy, dyy;
};

inline Stats explicit_stats(const repsim::DataMatrix& x, const repsim::DataMatrix& y) {
    const Mat X = to_eigen(x), Y = to_eigen(y);
    const Mat G = X * X.transpose();
    const Mat H = Y * Y.transpose();
    return {G.cwiseProduct(H).sum(),
            G.diagonal().cwiseProduct(H.diagonal()).sum(),
            G.cwiseProduct(G).sum(),
            G.diagonal().squaredNorm(),
            H.cwiseProduct(H).sum(),
            H.diagonal().squaredNorm()};
}

/// Traces of the explicit Gram products.
inline double rv(const repsim::DataMatrix& x, const repsim::DataMatrix& y) {
    const Mat X = to_eigen(x), Y = to_eigen(y);
    const Mat G = X * X.transpose();
    const Mat H = Y * Y.transpose();
    return (G * H).trace() / std::sqrt((G * G).trace() * (H * H).trace());
}

/// Diagonal-deleted Grams materialized, then vec inner products.
inline double rv2(const repsim::DataMatrix& x, const repsim::DataMatrix& y) {
    const Mat X = to_eigen(x), Y = to_eigen(y);
    Mat G = X * X.transpose();
    Mat H = Y * Y.transpose();
    G.diagonal().setZero();
    H.diagonal().setZero();
    const Eigen::Map<const Eigen::VectorXd> g(G.data(), G.size()), h(H.data(), H.size());
    return g.dot(h) / std::sqrt(g.dot(g) * h.dot(h));
}

inline double linear_cka(const repsim::DataMatrix& x, const repsim::DataMatrix& y) {
    Mat X = to_eigen(x), Y = to_eigen(y);
    X.rowwise() -= X.colwise().mean();
    Y.rowwise() -= Y.colwise().mean();
    return oracle::rv(from_eigen(X), from_eigen(Y));
}

inline repsim::DataMatrix random_normal(std::size_t n, std::size_t p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> v(n * p);
    for (double& e : v) e = normal(rng);
    return repsim::DataMatrix(n, p, std::move(v));
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian matrix.
inline Mat random_orthogonal(std::size_t p, std::uint64_t seed) {
    const Mat A = to_eigen(random_normal(p, p, seed));
    Eigen::HouseholderQR<Mat> qr(A);
    return qr.householderQ();
}

inline repsim::DataMatrix times(const repsim::DataMatrix& x, const Mat& a) {
    return from_eigen(to_eigen(x) * a);
}

inline repsim::DataMatrix scaled(const repsim::DataMatrix& x, double alpha) {
    return from_eigen(to_eigen(x) * alpha);
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
