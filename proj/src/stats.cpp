#include "cwica/stats.hpp"

#include <cmath>

namespace cwica {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

ColumnStats column_stats(const Matrix& m) {
    const std::size_t n = m.rows(), d = m.cols();
    ColumnStats st;
    st.mean.assign(d, 0.0);
    st.std.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < d; ++j) st.mean[j] += r[j];
    }
    for (std::size_t j = 0; j < d; ++j) st.mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double c = r[j] - st.mean[j];
            st.std[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j)
        st.std[j] = std::sqrt(st.std[j] / static_cast<double>(n));
    return st;
}

Matrix standardize_columns(const Matrix& m) {
    if (m.rows() < 2)
        throw dimension_error("standardize_columns: need at least 2 rows");
    const ColumnStats st = column_stats(m);
    Matrix out(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (st.std[j] < kDegenerateStd) {
            for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = 0.0;
        } else {
            const double inv = 1.0 / st.std[j];
            for (std::size_t i = 0; i < m.rows(); ++i)
                out(i, j) = (m(i, j) - st.mean[j]) * inv;
        }
    }
    return out;
}

Matrix pairwise_sq_dists(const Matrix& x, const Matrix& y) {
    if (x.cols() != y.cols())
        throw dimension_error("pairwise_sq_dists: column counts differ");
    const std::size_t d = x.cols();
    Matrix out(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* xi = x.row(i).data();
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const double* yj = y.row(j).data();
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = xi[k] - yj[k];
                s += diff * diff;
            }
            out(i, j) = s;
        }
    }
    return out;
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw dimension_error("pearson_corr: length mismatch");
    if (x.size() < 2)
        throw dimension_error("pearson_corr: need at least 2 samples");
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double cx = x[i] - mx, cy = y[i] - my;
        sxy += cx * cy;
        sxx += cx * cx;
        syy += cy * cy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0; // constant-vector convention
    double r = sxy / std::sqrt(sxx * syy);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

} // namespace cwica
