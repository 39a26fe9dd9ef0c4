#include "cwica/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cwica/csv.hpp"
#include "cwica/independence.hpp"
#include "cwica/mlp.hpp"
#include "cwica/stats.hpp"

namespace cwica {

using nlohmann::json;

namespace {

Assignment exhaustive_assignment(const Matrix& scores) {
    const std::size_t d = scores.rows();
    std::vector<std::size_t> perm(d), best(d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best_sum = -std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += scores(i, perm[i]);
        if (s > best_sum) {
            best_sum = s;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, best_sum / static_cast<double>(d)};
}

// Shortest-augmenting-path assignment on a minimization cost matrix.
std::vector<std::size_t> solve_min_assignment(const Matrix& cost) {
    const std::size_t n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> match(n, 0);
    for (std::size_t j = 1; j <= n; ++j)
        if (p[j] != 0) match[p[j] - 1] = j - 1;
    return match;
}

} // namespace

Assignment best_assignment(const Matrix& scores) {
    if (scores.rows() != scores.cols())
        throw dimension_error("best_assignment: square score matrix required");
    if (scores.rows() <= 8) return exhaustive_assignment(scores);
    Matrix cost = scores;
    for (double& v : cost.data()) v = -v;
    Assignment a;
    a.match = solve_min_assignment(cost);
    double s = 0.0;
    for (std::size_t i = 0; i < scores.rows(); ++i) s += scores(i, a.match[i]);
    a.mean_score = s / static_cast<double>(scores.rows());
    return a;
}

double max_corr(const Matrix& y, const Matrix& z) {
    if (y.cols() != z.cols())
        throw dimension_error("max_corr: source and latent column counts differ");
    if (y.rows() != z.rows())
        throw dimension_error("max_corr: row counts differ");
    const std::size_t d = y.cols();
    Matrix scores(d, d);
    std::vector<std::vector<double>> ycols(d), zcols(d);
    for (std::size_t j = 0; j < d; ++j) {
        ycols[j] = y.column(j);
        zcols[j] = z.column(j);
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            scores(i, j) = std::abs(pearson_corr(ycols[i], zcols[j]));
    return best_assignment(scores).mean_score;
}

MetricRecord eval_latents(const std::optional<Matrix>& y, const Matrix& z,
                          const Matrix& x, const std::optional<Matrix>& xhat) {
    MetricRecord rec;
    rec.dcor = dcor_pairwise(standardize_columns(z), PairReduce::mean);
    if (y) rec.max_corr = max_corr(*y, z);
    if (xhat)
        rec.mse = rec_error(x, *xhat) /
                  (static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
    return rec;
}

namespace {

double metric_value(const ReportRow& row, const std::string& metric) {
    if (metric == "max_corr") {
        if (!row.max_corr)
            throw config_error("rank_methods: method '" + row.method +
                               "' has no max_corr on dataset '" + row.dataset + "'");
        return *row.max_corr;
    }
    if (metric == "dcor") return row.dcor;
    if (metric == "mse") {
        if (!row.mse)
            throw config_error("rank_methods: method '" + row.method +
                               "' has no mse on dataset '" + row.dataset + "'");
        return *row.mse;
    }
    throw config_error("rank_methods: unknown metric '" + metric + "'");
}

} // namespace

std::map<std::string, double> rank_methods(const std::vector<ReportRow>& rows,
                                           const std::string& metric) {
    const bool higher_better = metric == "max_corr";

    std::map<std::string, std::map<std::string, double>> by_rep; // rep -> method -> value
    std::vector<std::string> methods;
    for (const ReportRow& r : rows) {
        const std::string rep = r.dataset + "#" + std::to_string(r.seed);
        if (by_rep[rep].count(r.method))
            throw config_error("rank_methods: duplicate cell for method '" + r.method +
                               "' on replication '" + rep + "'");
        by_rep[rep][r.method] = metric_value(r, metric);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
    }
    if (by_rep.empty()) throw config_error("rank_methods: no report rows");

    std::map<std::string, double> rank_sum;
    for (const auto& [rep, cells] : by_rep) {
        for (const std::string& m : methods)
            if (!cells.count(m))
                throw config_error("rank_methods: method '" + m +
                                   "' missing on replication '" + rep + "'");
        // sort best-first, average ranks over ties
        std::vector<std::pair<double, std::string>> order;
        for (const auto& [m, v] : cells)
            order.emplace_back(higher_better ? -v : v, m);
        std::sort(order.begin(), order.end());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && order[j + 1].first == order[i].first) ++j;
            const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank_sum[order[k].second] += avg_rank;
            i = j + 1;
        }
    }
    std::map<std::string, double> mean_rank;
    for (const auto& [m, s] : rank_sum)
        mean_rank[m] = s / static_cast<double>(by_rep.size());
    return mean_rank;
}

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<ReportRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << "method,dataset,seed,max_corr,dcor,mse\n";
    for (const ReportRow& r : rows) {
        f << r.method << ',' << r.dataset << ',' << r.seed << ',';
        if (r.max_corr) f << format_double(*r.max_corr);
        f << ',' << format_double(r.dcor) << ',';
        if (r.mse) f << format_double(*r.mse);
        f << '\n';
    }
    if (!f) throw io_error("write failed: " + path.string());
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw io_error("empty report: " + path.string());
    std::vector<ReportRow> rows;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        while (fields.size() < 6) fields.emplace_back();
        ReportRow r;
        r.method = fields[0];
        r.dataset = fields[1];
        r.seed = std::stoull(fields[2]);
        if (!fields[3].empty()) r.max_corr = parse_double(fields[3]);
        r.dcor = parse_double(fields[4]);
        if (!fields[5].empty()) r.mse = parse_double(fields[5]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_timings_csv(const std::filesystem::path& path,
                       const std::vector<ReportRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << "method,dataset,seed,runtime_seconds\n";
    for (const ReportRow& r : rows)
        f << r.method << ',' << r.dataset << ',' << r.seed << ','
          << format_double(r.runtime_seconds) << '\n';
}

void write_summary_json(const std::filesystem::path& path,
                        const std::vector<ReportRow>& rows) {
    struct Agg {
        double max_corr = 0.0, dcor = 0.0, mse = 0.0;
        std::size_t n = 0, n_maxcorr = 0, n_mse = 0;
    };
    std::map<std::string, Agg> agg;
    for (const ReportRow& r : rows) {
        Agg& a = agg[r.method];
        a.dcor += r.dcor;
        a.n += 1;
        if (r.max_corr) {
            a.max_corr += *r.max_corr;
            a.n_maxcorr += 1;
        }
        if (r.mse) {
            a.mse += *r.mse;
            a.n_mse += 1;
        }
    }
    json methods = json::object();
    for (const auto& [m, a] : agg) {
        json entry = {{"mean_dcor", a.dcor / static_cast<double>(a.n)},
                      {"replications", a.n}};
        if (a.n_maxcorr)
            entry["mean_max_corr"] = a.max_corr / static_cast<double>(a.n_maxcorr);
        if (a.n_mse) entry["mean_mse"] = a.mse / static_cast<double>(a.n_mse);
        methods[m] = entry;
    }
    json summary = {{"methods", methods}};
    bool all_have_maxcorr = true;
    for (const ReportRow& r : rows)
        if (!r.max_corr) all_have_maxcorr = false;
    if (!rows.empty()) {
        summary["ranks"] = json::object();
        summary["ranks"]["dcor"] = rank_methods(rows, "dcor");
        if (all_have_maxcorr) summary["ranks"]["max_corr"] = rank_methods(rows, "max_corr");
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << summary.dump(2) << '\n';
}

} // namespace cwica
