#pragma once

#include <cstddef>
#include <vector>

#include "cwica/matrix.hpp"
#include "cwica/rng.hpp"

namespace cwica {

/// Centering + PCA whitening transform: z = (x - mean) * projection, with
/// identity covariance on the retained d-dimensional subspace.
struct WhitenTransform {
    std::vector<double> mean;
    Matrix projection; ///< D x d
    std::vector<double> eigenvalues;
};

std::pair<Matrix, WhitenTransform> whiten(const Matrix& x, std::size_t d);
Matrix apply_whiten(const WhitenTransform& t, const Matrix& x);

enum class IcaNonlinearity { logcosh, exp, kurtosis };

struct LinearIcaResult {
    Matrix rotation;     ///< d x d, orthonormal rows in whitened space
    Matrix unmixing;     ///< d x D, rotation composed with the whitening
    WhitenTransform whitening;
    Matrix sources;      ///< recovered S on the fitted data
    std::size_t iterations = 0;
    bool converged = false;
};

/// Symmetric fixed-point FastICA:
///   W <- E[g(WZ) Z^T] - diag(E[g'(WZ)]) W, then symmetric orthogonalization,
/// until the largest row-angle change drops below tol or max_iter is hit.
/// Non-convergence is reported through the flag, never an error.
LinearIcaResult fastica(const Matrix& x, std::size_t d, IcaNonlinearity g,
                        std::size_t max_iter, double tol, Rng& rng);

/// Recovered sources for held-out rows.
Matrix apply_unmixing(const LinearIcaResult& r, const Matrix& x);

/// The do-nothing reference: first d columns of the standardized
/// observations, presented as predicted sources.
Matrix identity_baseline(const Matrix& x, std::size_t d);

} // namespace cwica
