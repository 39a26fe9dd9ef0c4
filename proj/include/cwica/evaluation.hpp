#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cwica/matrix.hpp"

namespace cwica {

/// Best one-to-one assignment on a square score matrix, maximizing the mean
/// of the matched entries. Exhaustive for d <= 8, Jonker-Volgenant style
/// assignment above. Returns the matched column per row and the mean.
struct Assignment {
    std::vector<std::size_t> match;
    double mean_score;
};
Assignment best_assignment(const Matrix& scores);

/// Mean of assignment-matched absolute Pearson correlations between true
/// sources and recovered latents; invariant to column permutation, sign
/// flips and positive rescaling of either argument.
double max_corr(const Matrix& y, const Matrix& z);

struct MetricRecord {
    std::optional<double> max_corr; ///< when sources are available
    double dcor;                    ///< mean pairwise dcor of normalized latents
    std::optional<double> mse;      ///< per-entry mean, when a reconstruction exists
};

MetricRecord eval_latents(const std::optional<Matrix>& y, const Matrix& z,
                          const Matrix& x, const std::optional<Matrix>& xhat);

/// One evaluated (method, dataset, seed) cell.
struct ReportRow {
    std::string method;
    std::string dataset;
    std::uint64_t seed = 0;
    std::optional<double> max_corr;
    double dcor = 0.0;
    std::optional<double> mse;
    double runtime_seconds = 0.0; ///< serialized to the timings sidecar only
};

/// Mean rank per method for one metric ("max_corr" higher-is-better;
/// "dcor"/"mse" lower-is-better), average-rank tie convention, one ranking
/// per replication (= dataset x seed). Every method must appear in every
/// replication.
std::map<std::string, double> rank_methods(const std::vector<ReportRow>& rows,
                                           const std::string& metric);

/// report.csv: method,dataset,seed,max_corr,dcor,mse (blank when absent).
/// Runtime goes to a separate timings.csv so reports stay byte-deterministic.
void write_report_csv(const std::filesystem::path& path,
                      const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);
void write_timings_csv(const std::filesystem::path& path,
                       const std::vector<ReportRow>& rows);

/// Aggregate means per method plus mean ranks for max_corr and dcor.
void write_summary_json(const std::filesystem::path& path,
                        const std::vector<ReportRow>& rows);

} // namespace cwica
