#include "cwica/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>

#include <json.hpp>

#include "cwica/csv.hpp"
#include "cwica/evaluation.hpp"
#include "cwica/stats.hpp"

namespace cwica {

using nlohmann::json;

MlpSpec make_encoder_spec(const TrainConfig& cfg, std::size_t input_dim) {
    std::vector<std::size_t> sizes;
    sizes.push_back(input_dim);
    sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
    sizes.push_back(cfg.latent_dim);
    return MlpSpec(std::move(sizes), cfg.hidden_activation);
}

MlpSpec make_decoder_spec(const TrainConfig& cfg, std::size_t input_dim) {
    std::vector<std::size_t> sizes;
    sizes.push_back(cfg.latent_dim);
    sizes.insert(sizes.end(), cfg.hidden_sizes.rbegin(), cfg.hidden_sizes.rend());
    sizes.push_back(input_dim);
    return MlpSpec(std::move(sizes), cfg.hidden_activation);
}

double bandwidth_for(const TrainConfig& cfg, std::size_t n) {
    return cfg.bandwidth_multiplier * silverman_gamma(n);
}

TrainState init_train_state(const TrainConfig& cfg, std::size_t input_dim, Rng& rng) {
    TrainState st;
    st.encoder_spec = make_encoder_spec(cfg, input_dim);
    st.decoder_spec = make_decoder_spec(cfg, input_dim);
    st.encoder = init_params(st.encoder_spec, rng);
    st.decoder = init_params(st.decoder_spec, rng);
    st.enc_m = MlpParams::zeros_like(st.encoder_spec);
    st.enc_v = MlpParams::zeros_like(st.encoder_spec);
    st.dec_m = MlpParams::zeros_like(st.decoder_spec);
    st.dec_v = MlpParams::zeros_like(st.decoder_spec);
    st.best_encoder = st.encoder;
    st.best_decoder = st.decoder;
    return st;
}

namespace {

// ---- Cramer-Wold distance with gradients w.r.t. both samples -------------
//
// phi(s) = (1 + 2s/D)^{-1/2}, phi'(s) = -phi(s)^3 / D; both are taken as 0
// at exactly coincident points, where the pair contributes a constant.

struct CwGradAccum {
    double value;
    Matrix gx, gy;
};

CwGradAccum cw_dist_sq_grad(const Matrix& x, const Matrix& y, const CwParams& p) {
    const std::size_t n = x.rows(), d = x.cols();
    const double dd = static_cast<double>(p.dim_d);
    const double inv4g = 1.0 / (4.0 * p.gamma);
    const double norm =
        1.0 / (2.0 * static_cast<double>(n) * static_cast<double>(n) *
               std::sqrt(std::numbers::pi * p.gamma));
    const double gscale = norm / p.gamma;

    CwGradAccum acc{0.0, Matrix(n, d, 0.0), Matrix(n, d, 0.0)};
    double sxx = 0.0, syy = 0.0, sxy = 0.0;

    // within-x pairs (i < i'), symmetric contributions
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i).data();
        double* gi = acc.gx.row(i).data();
        for (std::size_t k = i + 1; k < n; ++k) {
            const double* xk = x.row(k).data();
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = xi[c] - xk[c];
                sq += diff * diff;
            }
            if (sq == 0.0) continue;
            const double t = 1.0 / std::sqrt(1.0 + 2.0 * sq * inv4g / dd);
            sxx += 2.0 * t;
            const double w = -t * t * t / dd; // phi'
            double* gk = acc.gx.row(k).data();
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = xi[c] - xk[c];
                gi[c] += gscale * w * diff;
                gk[c] -= gscale * w * diff;
            }
        }
    }
    // within-y pairs
    for (std::size_t j = 0; j < n; ++j) {
        const double* yj = y.row(j).data();
        double* gj = acc.gy.row(j).data();
        for (std::size_t k = j + 1; k < n; ++k) {
            const double* yk = y.row(k).data();
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = yj[c] - yk[c];
                sq += diff * diff;
            }
            if (sq == 0.0) continue;
            const double t = 1.0 / std::sqrt(1.0 + 2.0 * sq * inv4g / dd);
            syy += 2.0 * t;
            const double w = -t * t * t / dd;
            double* gk = acc.gy.row(k).data();
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = yj[c] - yk[c];
                gj[c] += gscale * w * diff;
                gk[c] -= gscale * w * diff;
            }
        }
    }
    // cross pairs; the -2 of the formula flips their gradient sign
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i).data();
        double* gi = acc.gx.row(i).data();
        for (std::size_t j = 0; j < n; ++j) {
            const double* yj = y.row(j).data();
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = xi[c] - yj[c];
                sq += diff * diff;
            }
            if (sq == 0.0) continue;
            const double t = 1.0 / std::sqrt(1.0 + 2.0 * sq * inv4g / dd);
            sxy += t;
            const double w = -t * t * t / dd;
            double* gj = acc.gy.row(j).data();
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = xi[c] - yj[c];
                gi[c] -= gscale * w * diff;
                gj[c] += gscale * w * diff;
            }
        }
    }
    acc.value = norm * (sxx + syy - 2.0 * sxy);
    return acc;
}

// ---- componentwise normalization with backward ---------------------------

struct CnTrace {
    Matrix normalized;
    ColumnStats stats;
};

CnTrace cn_forward(const Matrix& m) {
    CnTrace t{standardize_columns(m), column_stats(m)};
    return t;
}

// dL/dinput given dL/doutput; degenerate columns pass no gradient.
Matrix cn_backward(const CnTrace& t, const Matrix& grad_out) {
    const std::size_t n = grad_out.rows(), d = grad_out.cols();
    const double dn = static_cast<double>(n);
    Matrix grad_in(n, d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = t.stats.std[j];
        if (sd < kDegenerateStd) continue;
        double gmean = 0.0, gdot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            gmean += grad_out(i, j);
            gdot += grad_out(i, j) * t.normalized(i, j);
        }
        gmean /= dn;
        gdot /= dn;
        const double inv = 1.0 / sd;
        for (std::size_t i = 0; i < n; ++i)
            grad_in(i, j) =
                inv * (grad_out(i, j) - gmean - t.normalized(i, j) * gdot);
    }
    return grad_in;
}

// ---- pairwise dcor loss with backward -------------------------------------

Matrix center_dist(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix out = a;
    std::vector<double> rmean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += out(i, j);
        rmean[i] = s / static_cast<double>(n);
        grand += s;
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) += grand - rmean[i] - rmean[j];
    return out;
}

// Sum over column pairs of dcor, on already-normalized columns. When grads
// is non-null, accumulates dL/d(columns) there (n x d).
double dcor_pairwise_sum_grad(const Matrix& u, Matrix* grads) {
    const std::size_t n = u.rows(), d = u.cols();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);

    std::vector<Matrix> dist(d), centered(d);
    std::vector<double> s2(d);
    for (std::size_t j = 0; j < d; ++j) {
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) a(i, k) = std::abs(u(i, j) - u(k, j));
        centered[j] = center_dist(a);
        dist[j] = std::move(a);
        double s = 0.0;
        for (double v : centered[j].data()) s += v * v;
        s2[j] = s;
    }

    std::vector<Matrix> ga;
    if (grads) ga.assign(d, Matrix(n, n, 0.0));

    double total = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
        for (std::size_t q = p + 1; q < d; ++q) {
            if (s2[p] / n2 <= 1e-12 || s2[q] / n2 <= 1e-12) continue;
            double s1 = 0.0;
            for (std::size_t k = 0; k < n * n; ++k)
                s1 += centered[p].data()[k] * centered[q].data()[k];
            if (s1 <= 0.0) continue;
            const double denom = std::sqrt(s2[p] * s2[q]);
            double r = std::sqrt(s1 / denom);
            total += std::min(r, 1.0);
            if (!grads || r <= 0.0) continue;
            const double d_s1 = 1.0 / (2.0 * r * denom);
            const double d_s2p = -r / (4.0 * s2[p]);
            const double d_s2q = -r / (4.0 * s2[q]);
            for (std::size_t k = 0; k < n * n; ++k) {
                ga[p].data()[k] += d_s1 * centered[q].data()[k] +
                                   2.0 * d_s2p * centered[p].data()[k];
                ga[q].data()[k] += d_s1 * centered[p].data()[k] +
                                   2.0 * d_s2q * centered[q].data()[k];
            }
        }
    }
    if (grads) {
        for (std::size_t j = 0; j < d; ++j) {
            // adjoint of double centering is double centering
            Matrix gd = center_dist(ga[j]);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (i == k) continue;
                    const double diff = u(i, j) - u(k, j);
                    if (diff == 0.0) continue;
                    const double sgn = diff > 0.0 ? 1.0 : -1.0;
                    acc += (gd(i, k) + gd(k, i)) * sgn;
                }
                (*grads)(i, j) += acc;
            }
        }
    }
    return total;
}

bool finite(const CostParts& p) {
    return std::isfinite(p.cost) && std::isfinite(p.indep) && std::isfinite(p.rec);
}

} // namespace

CostParts eval_cost(const Matrix& x, const MlpSpec& enc_spec, const MlpParams& enc,
                    const MlpSpec& dec_spec, const MlpParams& dec,
                    const TrainConfig& cfg,
                    const std::vector<std::size_t>& shift_indices) {
    const Matrix z = mlp_forward(enc, enc_spec, x);
    const Matrix xhat = mlp_forward(dec, dec_spec, z);
    const double rec = rec_error(x, xhat);

    double indep = 0.0;
    if (cfg.loss_kind == LossKind::cw) {
        const Matrix shifted = apply_shift_indices(z, shift_indices);
        const CwParams p{bandwidth_for(cfg, x.rows()), z.cols()};
        indep = cramer_wold_dist_sq(z, standardize_columns(shifted), p);
    } else {
        indep = dcor_pairwise(standardize_columns(z), PairReduce::sum);
    }
    return {indep * rec, indep, rec};
}

CostParts eval_cost_grad(const Matrix& x, const MlpSpec& enc_spec, const MlpParams& enc,
                         const MlpSpec& dec_spec, const MlpParams& dec,
                         const TrainConfig& cfg,
                         const std::vector<std::size_t>& shift_indices,
                         MlpParams& denc, MlpParams& ddec) {
    denc = MlpParams::zeros_like(enc_spec);
    ddec = MlpParams::zeros_like(dec_spec);

    const ForwardTrace enc_trace = mlp_forward_trace(enc, enc_spec, x);
    const Matrix& z = enc_trace.output();
    const std::size_t n = z.rows(), d = z.cols();

    const ForwardTrace dec_trace = mlp_forward_trace(dec, dec_spec, z);
    const Matrix& xhat = dec_trace.output();
    const double rec = rec_error(x, xhat);

    double indep = 0.0;
    Matrix d_indep_dz(n, d, 0.0);

    if (cfg.loss_kind == LossKind::cw) {
        const Matrix shifted = apply_shift_indices(z, shift_indices);
        const CnTrace cn = cn_forward(shifted);
        const CwParams p{bandwidth_for(cfg, x.rows()), d};
        CwGradAccum cw = cw_dist_sq_grad(z, cn.normalized, p);
        indep = cw.value;
        d_indep_dz = std::move(cw.gx);
        if (!cfg.detach_shift) {
            // back through the normalization, then scatter through the gather
            const Matrix g_shifted = cn_backward(cn, cw.gy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    d_indep_dz(shift_indices[i * d + j], j) += g_shifted(i, j);
        }
    } else {
        const CnTrace cn = cn_forward(z);
        Matrix g_norm(n, d, 0.0);
        indep = dcor_pairwise_sum_grad(cn.normalized, &g_norm);
        d_indep_dz = cn_backward(cn, g_norm);
    }

    // product rule: d(indep * rec) = rec * d(indep) + indep * d(rec)
    Matrix g_xhat(n, x.cols());
    for (std::size_t k = 0; k < g_xhat.size(); ++k)
        g_xhat.data()[k] = indep * 2.0 * (xhat.data()[k] - x.data()[k]);
    Matrix g_z = mlp_backward(dec, dec_spec, dec_trace, g_xhat, ddec);

    for (std::size_t k = 0; k < g_z.size(); ++k)
        g_z.data()[k] += rec * d_indep_dz.data()[k];
    mlp_backward(enc, enc_spec, enc_trace, g_z, denc);

    return {indep * rec, indep, rec};
}

CostParts total_cost(const Matrix& x, const TrainState& state, const TrainConfig& cfg,
                     Rng& rng) {
    std::vector<std::size_t> idx;
    if (cfg.loss_kind == LossKind::cw)
        idx = draw_shift_indices(x.rows(), cfg.latent_dim, rng, cfg.shift_mode);
    return eval_cost(x, state.encoder_spec, state.encoder, state.decoder_spec,
                     state.decoder, cfg, idx);
}

CostParts grad_total_cost(const Matrix& x, const TrainState& state,
                          const TrainConfig& cfg, Rng& rng, MlpParams& denc,
                          MlpParams& ddec) {
    std::vector<std::size_t> idx;
    if (cfg.loss_kind == LossKind::cw)
        idx = draw_shift_indices(x.rows(), cfg.latent_dim, rng, cfg.shift_mode);
    return eval_cost_grad(x, state.encoder_spec, state.encoder, state.decoder_spec,
                          state.decoder, cfg, idx, denc, ddec);
}

namespace {

void adam_update(MlpParams& theta, MlpParams& m, MlpParams& v, const MlpParams& g,
                 const TrainConfig& cfg, double t) {
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double corr1 = 1.0 - std::pow(b1, t);
    const double corr2 = 1.0 - std::pow(b2, t);
    auto update = [&](double& th, double& mm, double& vv, double gg) {
        mm = b1 * mm + (1.0 - b1) * gg;
        vv = b2 * vv + (1.0 - b2) * gg * gg;
        const double mhat = mm / corr1;
        const double vhat = vv / corr2;
        th -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
    };
    for (std::size_t l = 0; l < theta.weights.size(); ++l) {
        for (std::size_t k = 0; k < theta.weights[l].size(); ++k)
            update(theta.weights[l].data()[k], m.weights[l].data()[k],
                   v.weights[l].data()[k], g.weights[l].data()[k]);
        for (std::size_t k = 0; k < theta.biases[l].size(); ++k)
            update(theta.biases[l][k], m.biases[l][k], v.biases[l][k],
                   g.biases[l][k]);
    }
}

void sgd_update(MlpParams& theta, const MlpParams& g, double lr) {
    for (std::size_t l = 0; l < theta.weights.size(); ++l) {
        for (std::size_t k = 0; k < theta.weights[l].size(); ++k)
            theta.weights[l].data()[k] -= lr * g.weights[l].data()[k];
        for (std::size_t k = 0; k < theta.biases[l].size(); ++k)
            theta.biases[l][k] -= lr * g.biases[l][k];
    }
}

} // namespace

void optimizer_step(TrainState& state, const MlpParams& denc, const MlpParams& ddec,
                    const TrainConfig& cfg) {
    state.iteration += 1;
    if (cfg.optimizer == OptimizerKind::adam) {
        const double t = static_cast<double>(state.iteration);
        adam_update(state.encoder, state.enc_m, state.enc_v, denc, cfg, t);
        adam_update(state.decoder, state.dec_m, state.dec_v, ddec, cfg, t);
    } else {
        sgd_update(state.encoder, denc, cfg.learning_rate);
        sgd_update(state.decoder, ddec, cfg.learning_rate);
    }
}

namespace {

struct ValContext {
    Matrix x;
    std::optional<Matrix> y;
};

HistoryRow validation_row(const TrainState& state, const TrainConfig& cfg,
                          const ValContext& val, Rng& val_shift_rng,
                          const CostParts& train_parts, bool use_val_parts) {
    std::vector<std::size_t> idx;
    if (cfg.loss_kind == LossKind::cw)
        idx = draw_shift_indices(val.x.rows(), cfg.latent_dim, val_shift_rng,
                                 cfg.shift_mode);
    const CostParts vparts =
        eval_cost(val.x, state.encoder_spec, state.encoder, state.decoder_spec,
                  state.decoder, cfg, idx);

    const Matrix z = mlp_forward(state.encoder, state.encoder_spec, val.x);
    HistoryRow row;
    row.iteration = state.iteration;
    const CostParts& shown = use_val_parts ? vparts : train_parts;
    row.cost = shown.cost;
    row.indep = shown.indep;
    row.rec = shown.rec;
    row.val_cost = vparts.cost;
    row.val_dcor = dcor_pairwise(standardize_columns(z), PairReduce::mean);
    row.val_mse = vparts.rec /
                  (static_cast<double>(val.x.rows()) * static_cast<double>(val.x.cols()));
    if (val.y) row.val_maxcorr = max_corr(*val.y, z);
    return row;
}

double selection_value(const HistoryRow& row, SelectMetric metric) {
    return metric == SelectMetric::loss ? row.val_cost : row.val_dcor;
}

} // namespace

TrainState train(const Dataset& dataset, const TrainConfig& cfg) {
    if (dataset.splits.train.empty() || dataset.splits.validation.empty())
        throw config_error("train: dataset must have non-empty train and validation splits");
    if (cfg.batch_size < 2 || cfg.batch_size > dataset.splits.train.size())
        throw config_error("train: batch_size must be in [2, train split size]");

    Rng root(cfg.seed);
    Rng rng_init = root.sub("init");
    Rng rng_batch = root.sub("batch");
    Rng rng_shift = root.sub("shift");
    Rng rng_valshift = root.sub("valshift");

    const Matrix x_train = dataset.observations_at(dataset.splits.train);
    ValContext val{dataset.observations_at(dataset.splits.validation),
                   dataset.sources_at(dataset.splits.validation)};

    TrainState state = init_train_state(cfg, dataset.observations.cols(), rng_init);

    auto record = [&](const CostParts& parts, bool use_val_parts) {
        HistoryRow row =
            validation_row(state, cfg, val, rng_valshift, parts, use_val_parts);
        const double sel = selection_value(row, cfg.select_metric);
        if (sel < state.best_val_metric) {
            state.best_val_metric = sel;
            state.best_encoder = state.encoder;
            state.best_decoder = state.decoder;
            state.best_iteration = state.iteration;
        }
        state.history.push_back(std::move(row));
    };

    record({0.0, 0.0, 0.0}, /*use_val_parts=*/true);

    Matrix batch(std::max<std::size_t>(cfg.batch_size, 1), x_train.cols());
    std::vector<std::size_t> batch_idx(cfg.batch_size);
    MlpParams denc, ddec;
    MlpParams last_finite_enc = state.encoder, last_finite_dec = state.decoder;
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        for (std::size_t k = 0; k < cfg.batch_size; ++k)
            batch_idx[k] = rng_batch.uniform_index(x_train.rows());
        for (std::size_t k = 0; k < cfg.batch_size; ++k) {
            auto src = x_train.row(batch_idx[k]);
            std::copy(src.begin(), src.end(), batch.row(k).begin());
        }

        const CostParts parts =
            grad_total_cost(batch, state, cfg, rng_shift, denc, ddec);
        if (!finite(parts)) {
            // roll back to the last parameters that evaluated finite
            state.encoder = last_finite_enc;
            state.decoder = last_finite_dec;
            state.diverged = true;
            state.diverged_at = it;
            break;
        }
        last_finite_enc = state.encoder;
        last_finite_dec = state.decoder;
        optimizer_step(state, denc, ddec, cfg);
        if (it % cfg.eval_every == 0) record(parts, /*use_val_parts=*/false);
    }
    return state;
}

GridSearchResult grid_search(const Dataset& dataset,
                             const std::vector<double>& learning_rates,
                             const std::vector<double>& bandwidth_multipliers,
                             const std::vector<std::size_t>& batch_sizes,
                             const TrainConfig& tmpl, std::size_t jobs) {
    std::vector<TrainConfig> cells;
    const std::vector<double> lrs =
        learning_rates.empty() ? std::vector<double>{tmpl.learning_rate} : learning_rates;
    const std::vector<double> bws = bandwidth_multipliers.empty()
                                        ? std::vector<double>{tmpl.bandwidth_multiplier}
                                        : bandwidth_multipliers;
    const std::vector<std::size_t> batches =
        batch_sizes.empty() ? std::vector<std::size_t>{tmpl.batch_size} : batch_sizes;
    for (double lr : lrs)
        for (double bw : bws)
            for (std::size_t b : batches) {
                TrainConfig c = tmpl;
                c.learning_rate = lr;
                c.bandwidth_multiplier = bw;
                c.batch_size = b;
                c.seed = Rng(tmpl.seed).sub("grid").sub(cells.size()).seed();
                cells.push_back(c);
            }
    if (cells.empty()) throw config_error("grid_search: empty grid");

    std::vector<TrainState> states(cells.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            states[i] = train(dataset, cells[i]);
    } else {
        std::vector<std::future<TrainState>> futures(cells.size());
        std::size_t next = 0, running_base = 0;
        while (running_base < cells.size()) {
            const std::size_t stop = std::min(running_base + jobs, cells.size());
            for (next = running_base; next < stop; ++next)
                futures[next] = std::async(std::launch::async, [&, next] {
                    return train(dataset, cells[next]);
                });
            for (std::size_t i = running_base; i < stop; ++i) states[i] = futures[i].get();
            running_base = stop;
        }
    }

    GridSearchResult result;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        GridCellResult cell;
        cell.config = cells[i];
        cell.diverged = states[i].diverged;
        cell.selection_value = states[i].best_val_metric;
        cell.best_iteration = states[i].best_iteration;
        // metrics of the best-snapshot history row
        for (const HistoryRow& row : states[i].history)
            if (row.iteration == states[i].best_iteration) {
                cell.val_cost = row.val_cost;
                cell.val_dcor = row.val_dcor;
                cell.val_mse = row.val_mse;
                cell.val_maxcorr = row.val_maxcorr;
            }
        result.cells.push_back(cell);
        if (cell.selection_value < best) {
            best = cell.selection_value;
            result.best_index = i;
        }
    }
    result.best_config = cells[result.best_index];
    result.best_state = std::move(states[result.best_index]);
    return result;
}

// ---- serialization --------------------------------------------------------

namespace {

const char* to_string(Activation a) {
    switch (a) {
    case Activation::tanh_fn: return "tanh";
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::tanh_fn;
    if (s == "relu") return Activation::relu;
    if (s == "linear") return Activation::linear;
    throw config_error("unknown activation: " + s);
}

json spec_to_json(const MlpSpec& spec) {
    json acts = json::array();
    for (Activation a : spec.hidden_activations) acts.push_back(to_string(a));
    return {{"layer_sizes", spec.layer_sizes}, {"hidden_activations", acts}};
}

MlpSpec spec_from_json(const json& j) {
    MlpSpec spec;
    spec.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    for (const auto& a : j.at("hidden_activations"))
        spec.hidden_activations.push_back(activation_from_string(a.get<std::string>()));
    spec.validate();
    return spec;
}

json config_to_json(const TrainConfig& c) {
    return {{"loss_kind", c.loss_kind == LossKind::cw ? "cw" : "dcor"},
            {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"bandwidth_multiplier", c.bandwidth_multiplier},
            {"max_iterations", c.max_iterations},
            {"eval_every", c.eval_every},
            {"seed", c.seed},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"adam_epsilon", c.adam_epsilon},
            {"shift_mode",
             c.shift_mode == ShiftMode::replacement ? "replacement" : "permutation"},
            {"detach_shift", c.detach_shift},
            {"optimizer", c.optimizer == OptimizerKind::adam ? "adam" : "sgd"},
            {"select_metric", c.select_metric == SelectMetric::loss ? "loss" : "dcor"},
            {"hidden_sizes", c.hidden_sizes},
            {"latent_dim", c.latent_dim},
            {"hidden_activation", to_string(c.hidden_activation)}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.loss_kind = j.at("loss_kind") == "cw" ? LossKind::cw : LossKind::dcor;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.bandwidth_multiplier = j.at("bandwidth_multiplier").get<double>();
    c.max_iterations = j.at("max_iterations").get<std::size_t>();
    c.eval_every = j.at("eval_every").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_epsilon = j.at("adam_epsilon").get<double>();
    c.shift_mode = j.at("shift_mode") == "replacement" ? ShiftMode::replacement
                                                       : ShiftMode::permutation;
    c.detach_shift = j.at("detach_shift").get<bool>();
    c.optimizer = j.at("optimizer") == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
    c.select_metric =
        j.at("select_metric") == "loss" ? SelectMetric::loss : SelectMetric::dcor;
    c.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
    c.latent_dim = j.at("latent_dim").get<std::size_t>();
    c.hidden_activation =
        activation_from_string(j.at("hidden_activation").get<std::string>());
    return c;
}

json params_to_json(const MlpParams& p) { return json(p.flatten()); }

MlpParams params_from_json(const json& j, const MlpSpec& spec) {
    MlpParams p = MlpParams::zeros_like(spec);
    p.unflatten(j.get<std::vector<double>>());
    return p;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const TrainState& state,
                     const TrainConfig& cfg) {
    json j = {{"format_version", 1},
              {"config", config_to_json(cfg)},
              {"encoder_spec", spec_to_json(state.encoder_spec)},
              {"decoder_spec", spec_to_json(state.decoder_spec)},
              {"iteration", state.iteration},
              {"encoder", params_to_json(state.encoder)},
              {"decoder", params_to_json(state.decoder)},
              {"enc_m", params_to_json(state.enc_m)},
              {"enc_v", params_to_json(state.enc_v)},
              {"dec_m", params_to_json(state.dec_m)},
              {"dec_v", params_to_json(state.dec_v)},
              {"best_encoder", params_to_json(state.best_encoder)},
              {"best_decoder", params_to_json(state.best_decoder)},
              {"best_val_metric", state.best_val_metric},
              {"best_iteration", state.best_iteration},
              {"diverged", state.diverged},
              {"diverged_at", state.diverged_at}};
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << j.dump(2) << '\n';
    if (!f) throw io_error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open: " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw io_error("bad JSON in " + path.string() + ": " + e.what());
    }
    Checkpoint ck;
    ck.config = config_from_json(j.at("config"));
    ck.state.encoder_spec = spec_from_json(j.at("encoder_spec"));
    ck.state.decoder_spec = spec_from_json(j.at("decoder_spec"));
    ck.state.iteration = j.at("iteration").get<std::size_t>();
    ck.state.encoder = params_from_json(j.at("encoder"), ck.state.encoder_spec);
    ck.state.decoder = params_from_json(j.at("decoder"), ck.state.decoder_spec);
    ck.state.enc_m = params_from_json(j.at("enc_m"), ck.state.encoder_spec);
    ck.state.enc_v = params_from_json(j.at("enc_v"), ck.state.encoder_spec);
    ck.state.dec_m = params_from_json(j.at("dec_m"), ck.state.decoder_spec);
    ck.state.dec_v = params_from_json(j.at("dec_v"), ck.state.decoder_spec);
    ck.state.best_encoder = params_from_json(j.at("best_encoder"), ck.state.encoder_spec);
    ck.state.best_decoder = params_from_json(j.at("best_decoder"), ck.state.decoder_spec);
    ck.state.best_val_metric = j.at("best_val_metric").get<double>();
    ck.state.best_iteration = j.at("best_iteration").get<std::size_t>();
    ck.state.diverged = j.at("diverged").get<bool>();
    ck.state.diverged_at = j.at("diverged_at").get<std::size_t>();
    return ck;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<HistoryRow>& history) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << "iteration,cost,indep,rec,val_cost,val_maxcorr,val_dcor,val_mse\n";
    for (const HistoryRow& r : history) {
        f << r.iteration << ',' << format_double(r.cost) << ',' << format_double(r.indep)
          << ',' << format_double(r.rec) << ',' << format_double(r.val_cost) << ',';
        if (r.val_maxcorr) f << format_double(*r.val_maxcorr);
        f << ',' << format_double(r.val_dcor) << ',' << format_double(r.val_mse) << '\n';
    }
    if (!f) throw io_error("write failed: " + path.string());
}

} // namespace cwica
