#pragma once

#include <span>
#include <vector>

#include "cwica/matrix.hpp"

namespace cwica {

/// Standard deviation used throughout the project: population convention
/// (divisor n). Columns whose std falls below this are treated as constant.
inline constexpr double kDegenerateStd = 1e-12;

struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> std; // population (divisor n)
};

ColumnStats column_stats(const Matrix& m);

/// Componentwise normalization: every column to mean 0 / std 1 (population
/// divisor). Constant columns (std < 1e-12) come back as all zeros.
Matrix standardize_columns(const Matrix& m);

/// out[i][j] = squared Euclidean distance between row i of x and row j of y.
Matrix pairwise_sq_dists(const Matrix& x, const Matrix& y);

/// Pearson product-moment correlation; 0 when either input is constant.
double pearson_corr(std::span<const double> x, std::span<const double> y);

double mean_of(std::span<const double> v);

} // namespace cwica
