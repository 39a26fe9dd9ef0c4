#include "cwica/baselines.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "cwica/stats.hpp"

namespace cwica {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j)
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
    return out;
}

} // namespace

std::pair<Matrix, WhitenTransform> whiten(const Matrix& x, std::size_t d) {
    if (d < 1 || x.cols() < d)
        throw dimension_error("whiten: need 1 <= d <= columns");
    if (x.rows() <= x.cols())
        throw dimension_error("whiten: need more rows than columns");

    const std::size_t n = x.rows(), dim = x.cols();
    WhitenTransform t;
    t.mean.assign(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = x.row(i);
        for (std::size_t j = 0; j < dim; ++j) t.mean[j] += r[j];
    }
    for (double& m : t.mean) m /= static_cast<double>(n);

    Eigen::MatrixXd xc(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            xc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                x(i, j) - t.mean[j];
    Eigen::MatrixXd cov = (xc.transpose() * xc) / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw degeneracy_error("whiten: eigendecomposition failed");

    // eigenvalues ascending; keep the top d, reject numerically null ones
    Eigen::MatrixXd proj(dim, d);
    t.eigenvalues.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        const Eigen::Index src = static_cast<Eigen::Index>(dim - 1 - k);
        const double lambda = eig.eigenvalues()(src);
        if (lambda < 1e-10)
            throw degeneracy_error("whiten: requested " + std::to_string(d) +
                                   " components but numerical rank is smaller");
        proj.col(static_cast<Eigen::Index>(k)) =
            eig.eigenvectors().col(src) / std::sqrt(lambda);
        t.eigenvalues[k] = lambda;
    }
    t.projection = from_eigen(proj);
    return {from_eigen(xc * proj), t};
}

Matrix apply_whiten(const WhitenTransform& t, const Matrix& x) {
    if (x.cols() != t.projection.rows())
        throw dimension_error("apply_whiten: dimension mismatch");
    Matrix centered = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = centered.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) r[j] -= t.mean[j];
    }
    return matmul(centered, t.projection);
}

namespace {

// Symmetric orthogonalization W <- (W W^T)^{-1/2} W.
Eigen::MatrixXd sym_orthogonalize(const Eigen::MatrixXd& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
    Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    return eig.eigenvectors() * inv_sqrt.asDiagonal() *
           eig.eigenvectors().transpose() * w;
}

} // namespace

LinearIcaResult fastica(const Matrix& x, std::size_t d, IcaNonlinearity g,
                        std::size_t max_iter, double tol, Rng& rng) {
    auto [z_host, transform] = whiten(x, d);
    const Eigen::MatrixXd z = to_eigen(z_host); // n x d
    const double n = static_cast<double>(z.rows());

    Eigen::MatrixXd w(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
    w = sym_orthogonalize(w);

    LinearIcaResult result;
    result.converged = false;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        const Eigen::MatrixXd u = z * w.transpose(); // n x d projections
        Eigen::MatrixXd gu(u.rows(), u.cols());
        Eigen::VectorXd gprime_mean(d);
        switch (g) {
        case IcaNonlinearity::logcosh:
            gu = u.array().tanh();
            gprime_mean = (1.0 - gu.array().square()).colwise().mean();
            break;
        case IcaNonlinearity::exp: {
            const Eigen::ArrayXXd e = (-u.array().square() / 2.0).exp();
            gu = (u.array() * e).matrix();
            gprime_mean = ((1.0 - u.array().square()) * e).colwise().mean();
            break;
        }
        case IcaNonlinearity::kurtosis:
            gu = u.array().cube();
            gprime_mean = (3.0 * u.array().square()).colwise().mean();
            break;
        }
        Eigen::MatrixXd w_new = (gu.transpose() * z) / n - gprime_mean.asDiagonal() * w;
        w_new = sym_orthogonalize(w_new);

        // largest change of any component direction, sign-invariant
        double delta = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double dot = std::abs(
                w_new.row(static_cast<Eigen::Index>(k))
                    .dot(w.row(static_cast<Eigen::Index>(k))));
            delta = std::max(delta, std::abs(1.0 - dot));
        }
        w = std::move(w_new);
        if (delta < tol) {
            result.converged = true;
            ++it;
            break;
        }
    }

    result.iterations = it;
    result.rotation = from_eigen(w);
    result.whitening = std::move(transform);
    result.unmixing = matmul(result.rotation, result.whitening.projection.transposed());
    result.sources = matmul(z_host, result.rotation.transposed());
    return result;
}

Matrix apply_unmixing(const LinearIcaResult& r, const Matrix& x) {
    return matmul(apply_whiten(r.whitening, x), r.rotation.transposed());
}

Matrix identity_baseline(const Matrix& x, std::size_t d) {
    if (x.cols() < d)
        throw dimension_error("identity_baseline: fewer columns than requested");
    return standardize_columns(x).take_cols(d);
}

} // namespace cwica
