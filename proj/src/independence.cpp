#include "cwica/independence.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "cwica/stats.hpp"

namespace cwica {

double phi_d(double s, std::size_t d) {
    if (s < 0.0) throw domain_error("phi_d: s must be >= 0");
    if (d < 1) throw domain_error("phi_d: D must be >= 1");
    if (s == 0.0) return 0.0;
    return 1.0 / std::sqrt(1.0 + 2.0 * s / static_cast<double>(d));
}

double silverman_gamma(std::size_t n) {
    if (n == 0) throw domain_error("silverman_gamma: n must be >= 1");
    return std::pow(4.0 / (3.0 * static_cast<double>(n)), 0.2);
}

namespace {

// Sum of phi_D(|a_i - b_j|^2 / 4g) over all row pairs of two same-width
// matrices; phi contributes 0 at exactly coincident points.
double phi_pair_sum(const Matrix& a, const Matrix& b, double inv4g, double d) {
    const std::size_t cols = a.cols();
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i).data();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* bj = b.row(j).data();
            double sq = 0.0;
            for (std::size_t k = 0; k < cols; ++k) {
                const double diff = ai[k] - bj[k];
                sq += diff * diff;
            }
            if (sq == 0.0) continue;
            total += 1.0 / std::sqrt(1.0 + 2.0 * sq * inv4g / d);
        }
    }
    return total;
}

} // namespace

double cramer_wold_dist_sq(const Matrix& x, const Matrix& y, const CwParams& p) {
    if (p.gamma <= 0.0) throw domain_error("cramer_wold_dist_sq: gamma must be > 0");
    if (x.cols() != p.dim_d || y.cols() != p.dim_d)
        throw dimension_error("cramer_wold_dist_sq: ambient dimension mismatch");
    if (x.rows() != y.rows())
        throw dimension_error("cramer_wold_dist_sq: sample sizes differ");
    if (x.rows() < 2)
        throw dimension_error("cramer_wold_dist_sq: need n >= 2");

    const double n = static_cast<double>(x.rows());
    const double d = static_cast<double>(p.dim_d);
    const double inv4g = 1.0 / (4.0 * p.gamma);
    const double norm = 1.0 / (2.0 * n * n * std::sqrt(std::numbers::pi * p.gamma));

    const double sxx = phi_pair_sum(x, x, inv4g, d);
    const double syy = phi_pair_sum(y, y, inv4g, d);
    const double sxy = phi_pair_sum(x, y, inv4g, d);
    return norm * (sxx + syy - 2.0 * sxy);
}

std::vector<std::size_t> draw_shift_indices(std::size_t n, std::size_t d, Rng& rng,
                                            ShiftMode mode) {
    if (n < 2) throw dimension_error("draw_shift_indices: need n >= 2");
    std::vector<std::size_t> idx(n * d);
    if (mode == ShiftMode::replacement) {
        // Independent uniform row draw per entry, column-major draw order so
        // each column is one contiguous sub-sequence of the stream.
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < n; ++i) idx[i * d + j] = rng.uniform_index(n);
    } else {
        std::vector<std::size_t> perm(n);
        for (std::size_t j = 0; j < d; ++j) {
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            rng.shuffle(perm.begin(), perm.end());
            for (std::size_t i = 0; i < n; ++i) idx[i * d + j] = perm[i];
        }
    }
    return idx;
}

Matrix apply_shift_indices(const Matrix& z, const std::vector<std::size_t>& indices) {
    if (indices.size() != z.rows() * z.cols())
        throw dimension_error("apply_shift_indices: index count mismatch");
    Matrix out(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t j = 0; j < z.cols(); ++j)
            out(i, j) = z(indices[i * z.cols() + j], j);
    return out;
}

ShiftSample resample_shift(const Matrix& z, Rng& rng, ShiftMode mode) {
    ShiftSample s;
    s.source_indices = draw_shift_indices(z.rows(), z.cols(), rng, mode);
    s.shifted = apply_shift_indices(z, s.source_indices);
    return s;
}

double independence_index(const Matrix& z, const CwParams& p, Rng& rng, ShiftMode mode) {
    const ShiftSample shift = resample_shift(z, rng, mode);
    return cramer_wold_dist_sq(z, standardize_columns(shift.shifted), p);
}

namespace {

// Euclidean distance matrix of a sample's rows, double-centered in place:
// subtract row means and column means, add the grand mean.
Matrix centered_dist_matrix(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix a = pairwise_sq_dists(x, x);
    for (double& v : a.data()) v = std::sqrt(v);
    std::vector<double> rmean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += a(i, j);
        rmean[i] = s / static_cast<double>(n);
        grand += s;
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);
    // symmetric, so column means equal row means
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) += grand - rmean[i] - rmean[j];
    return a;
}

} // namespace

double dcor(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows())
        throw dimension_error("dcor: row counts differ");
    if (x.rows() < 2) throw dimension_error("dcor: need n >= 2");
    const std::size_t n = x.rows();
    const Matrix a = centered_dist_matrix(x);
    const Matrix b = centered_dist_matrix(y);
    double s_ab = 0.0, s_aa = 0.0, s_bb = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
        s_ab += a.data()[k] * b.data()[k];
        s_aa += a.data()[k] * a.data()[k];
        s_bb += b.data()[k] * b.data()[k];
    }
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double dvar_x = s_aa / n2;
    const double dvar_y = s_bb / n2;
    if (dvar_x <= 1e-12 || dvar_y <= 1e-12) return 0.0;
    const double dcov2 = s_ab / n2;
    if (dcov2 <= 0.0) return 0.0;
    double r = std::sqrt(dcov2 / std::sqrt(dvar_x * dvar_y));
    if (r > 1.0) r = 1.0;
    return r;
}

double dcor_pairwise(const Matrix& z, PairReduce reduce) {
    const std::size_t d = z.cols();
    if (d < 2) throw dimension_error("dcor_pairwise: need at least 2 columns");
    double total = 0.0;
    std::size_t pairs = 0;
    std::vector<Matrix> cols;
    cols.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        Matrix c(z.rows(), 1);
        for (std::size_t i = 0; i < z.rows(); ++i) c(i, 0) = z(i, j);
        cols.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            total += dcor(cols[i], cols[j]);
            ++pairs;
        }
    return reduce == PairReduce::sum ? total : total / static_cast<double>(pairs);
}

} // namespace cwica
