#pragma once

#include <cstddef>
#include <vector>

#include "cwica/matrix.hpp"
#include "cwica/rng.hpp"

namespace cwica {

/// Smoothing parameters of the Cramer-Wold distance.
struct CwParams {
    double gamma;      ///< bandwidth, > 0
    std::size_t dim_d; ///< ambient dimension D, >= 1
};

/// Asymptotic projection kernel phi_D(s) = (1 + 2s/D)^{-1/2}, with
/// phi_D(0) = 0 applied whenever the argument is exactly zero.
double phi_d(double s, std::size_t d);

/// One-dimensional Silverman rule-of-thumb bandwidth (4/(3n))^{1/5}.
double silverman_gamma(std::size_t n);

/// Closed-form squared Cramer-Wold distance between two equal-size samples
/// in R^D:
///
///   d2 = 1/(2 n^2 sqrt(pi*gamma)) * ( sum_{ii'} phi_D(|xi-xi'|^2 / 4g)
///        + sum_{jj'} phi_D(|yj-yj'|^2 / 4g) - 2 sum_{ij} phi_D(|xi-yj|^2 / 4g) )
///
/// Zero-distance pairs contribute nothing (phi_D(0) = 0), which makes
/// cramer_wold_dist_sq(X, X) exactly 0.
double cramer_wold_dist_sq(const Matrix& x, const Matrix& y, const CwParams& p);

/// How resample_shift breaks cross-column dependence.
enum class ShiftMode {
    replacement, ///< each entry drawn uniformly with replacement (default)
    permutation, ///< each column independently permuted
};

/// Columnwise row-resampled copy of a latent sample. Every entry of
/// `shifted` is an entry of the same column of the input; `source_indices`
/// (row-major, same shape) records which row it came from.
struct ShiftSample {
    Matrix shifted;
    std::vector<std::size_t> source_indices;
};

/// Draw the shift row indices only (n*d, row-major).
std::vector<std::size_t> draw_shift_indices(std::size_t n, std::size_t d, Rng& rng,
                                            ShiftMode mode = ShiftMode::replacement);

/// Apply recorded indices to a matrix of the matching shape.
Matrix apply_shift_indices(const Matrix& z, const std::vector<std::size_t>& indices);

ShiftSample resample_shift(const Matrix& z, Rng& rng,
                           ShiftMode mode = ShiftMode::replacement);

/// Independence index ii_D(Z) = d2_cw(Z, cn(Z_shift)): distance between the
/// latents and a componentwise-normalized resampled copy whose columns are
/// independent by construction. One fresh shift sample per call.
double independence_index(const Matrix& z, const CwParams& p, Rng& rng,
                          ShiftMode mode = ShiftMode::replacement);

/// Szekely-Rizzo sample distance correlation between two row-aligned
/// samples, in [0, 1]. Returns 0 when either distance variance is
/// degenerate (<= 1e-12).
double dcor(const Matrix& x, const Matrix& y);

enum class PairReduce {
    sum, ///< training-loss convention
    mean ///< evaluation convention
};

/// dcor over every unordered column pair of z, reduced by sum or mean.
double dcor_pairwise(const Matrix& z, PairReduce reduce);

} // namespace cwica
