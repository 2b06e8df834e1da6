#include <vector>

#include "repsim/kernels.hpp"

namespace repsim::kernels::serial {

namespace {

double dot_rows(const DataMatrix& m, std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m.n_feat(); ++k) acc += m(i, k) * m(j, k);
    return acc;
}

double cross_frobenius_sq(const DataMatrix& a, const DataMatrix& b) {
    double total = 0.0;
    for (std::size_t u = 0; u < a.n_feat(); ++u) {
        for (std::size_t v = 0; v < b.n_feat(); ++v) {
            double c = 0.0;
            for (std::size_t i = 0; i < a.n_obs(); ++i) c += a(i, u) * b(i, v);
            total += c * c;
        }
    }
    return total;
}

void diagonal_terms(const DataMatrix& x, const DataMatrix& y, CrossStats& s) {
    for (std::size_t i = 0; i < x.n_obs(); ++i) {
        const double gx = dot_rows(x, i, i);
        const double gy = dot_rows(y, i, i);
        s.d_diag += gx * gy;
        s.dxx += gx * gx;
        s.dyy += gy * gy;
    }
}

}  // namespace

CrossStats feature_space_stats(const DataMatrix& x, const DataMatrix& y) {
    CrossStats s;
    s.t_cross = cross_frobenius_sq(x, y);
    s.sxx = cross_frobenius_sq(x, x);
    s.syy = cross_frobenius_sq(y, y);
    diagonal_terms(x, y, s);
    return s;
}

CrossStats gram_space_stats(const DataMatrix& x, const DataMatrix& y) {
    CrossStats s;
    for (std::size_t i = 0; i < x.n_obs(); ++i) {
        for (std::size_t j = 0; j < x.n_obs(); ++j) {
            const double gx = dot_rows(x, i, j);
            const double gy = dot_rows(y, i, j);
            s.t_cross += gx * gy;
            s.sxx += gx * gx;
            s.syy += gy * gy;
        }
    }
    diagonal_terms(x, y, s);
    return s;
}

}  // namespace repsim::kernels::serial
