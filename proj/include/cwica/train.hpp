#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "cwica/datagen.hpp"
#include "cwica/independence.hpp"
#include "cwica/mlp.hpp"

namespace cwica {

enum class LossKind { cw, dcor };
enum class OptimizerKind { adam, sgd };

/// Which validation quantity picks the "best" snapshot / grid cell.
enum class SelectMetric { loss, dcor };

struct TrainConfig {
    LossKind loss_kind = LossKind::cw;
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    double bandwidth_multiplier = 1.0;
    std::size_t max_iterations = 30000;
    std::size_t eval_every = 100;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    ShiftMode shift_mode = ShiftMode::replacement;
    bool detach_shift = false; ///< stop-gradient through the resampled copy
    OptimizerKind optimizer = OptimizerKind::adam;
    SelectMetric select_metric = SelectMetric::loss;
    std::vector<std::size_t> hidden_sizes = {64, 64};
    std::size_t latent_dim = 6;
    Activation hidden_activation = Activation::tanh_fn;
};

MlpSpec make_encoder_spec(const TrainConfig& cfg, std::size_t input_dim);
MlpSpec make_decoder_spec(const TrainConfig& cfg, std::size_t input_dim);

/// Bandwidth used for a sample of n rows: multiplier * (4/(3n))^{1/5}.
double bandwidth_for(const TrainConfig& cfg, std::size_t n);

struct CostParts {
    double cost;  ///< indep * rec
    double indep; ///< ii_D (cw) or pairwise-dcor sum (dcor)
    double rec;   ///< summed squared reconstruction residual
};

struct HistoryRow {
    std::size_t iteration;
    double cost, indep, rec; ///< last training batch (validation values at iter 0)
    double val_cost;
    std::optional<double> val_maxcorr; ///< absent when the dataset has no sources
    double val_dcor;
    double val_mse;
};

struct TrainState {
    MlpSpec encoder_spec, decoder_spec;
    MlpParams encoder, decoder;
    MlpParams enc_m, enc_v, dec_m, dec_v; ///< Adam moment accumulators
    std::size_t iteration = 0;
    std::vector<HistoryRow> history;

    MlpParams best_encoder, best_decoder;
    double best_val_metric = std::numeric_limits<double>::infinity();
    std::size_t best_iteration = 0;

    bool diverged = false;
    std::size_t diverged_at = 0;
};

TrainState init_train_state(const TrainConfig& cfg, std::size_t input_dim, Rng& rng);

/// Deterministic multiplicative cost with the shift row indices frozen
/// (`shift_indices` is ignored by the dcor loss). This is the quantity the
/// analytic gradients differentiate.
CostParts eval_cost(const Matrix& x, const MlpSpec& enc_spec, const MlpParams& enc,
                    const MlpSpec& dec_spec, const MlpParams& dec,
                    const TrainConfig& cfg,
                    const std::vector<std::size_t>& shift_indices);

/// Exact reverse-mode gradients of eval_cost with respect to every encoder
/// and decoder parameter. Gradients flow through the reconstruction term,
/// through both arguments of the CW distance, through the resampling gather
/// and through the normalization statistics of the shifted copy; the drawn
/// indices themselves are constants. `denc`/`ddec` are overwritten.
CostParts eval_cost_grad(const Matrix& x, const MlpSpec& enc_spec, const MlpParams& enc,
                         const MlpSpec& dec_spec, const MlpParams& dec,
                         const TrainConfig& cfg,
                         const std::vector<std::size_t>& shift_indices,
                         MlpParams& denc, MlpParams& ddec);

/// Fresh-shift wrappers used by the training loop.
CostParts total_cost(const Matrix& x, const TrainState& state, const TrainConfig& cfg,
                     Rng& rng);
CostParts grad_total_cost(const Matrix& x, const TrainState& state,
                          const TrainConfig& cfg, Rng& rng, MlpParams& denc,
                          MlpParams& ddec);

/// One optimizer update (Adam with bias correction, or plain SGD);
/// increments the iteration counter.
void optimizer_step(TrainState& state, const MlpParams& denc, const MlpParams& ddec,
                    const TrainConfig& cfg);

/// Algorithm: sample batch -> encode -> resample+normalize -> multiplicative
/// cost -> update, for max_iterations; history recorded at iteration 0 and
/// every eval_every iterations; keeps the best-on-validation snapshot.
TrainState train(const Dataset& dataset, const TrainConfig& cfg);

struct GridCellResult {
    TrainConfig config;
    double selection_value = std::numeric_limits<double>::infinity();
    double val_cost = 0.0, val_dcor = 0.0, val_mse = 0.0;
    std::optional<double> val_maxcorr;
    std::size_t best_iteration = 0;
    bool diverged = false;
};

struct GridSearchResult {
    std::size_t best_index = 0;
    TrainConfig best_config;
    TrainState best_state;
    std::vector<GridCellResult> cells;
};

/// Cartesian grid over learning rates x bandwidth multipliers x batch
/// sizes (pass a single-element list to hold an axis fixed). One Rng
/// sub-stream per cell; cells may run in parallel (`jobs`). Selection is by
/// smallest validation value of cfg.select_metric.
GridSearchResult grid_search(const Dataset& dataset,
                             const std::vector<double>& learning_rates,
                             const std::vector<double>& bandwidth_multipliers,
                             const std::vector<std::size_t>& batch_sizes,
                             const TrainConfig& tmpl, std::size_t jobs = 1);

struct Checkpoint {
    TrainState state;
    TrainConfig config;
};

/// Single JSON document: format version, config echo, layer specs,
/// flattened parameters, optimizer moments, iteration count, best snapshot.
void save_checkpoint(const std::filesystem::path& path, const TrainState& state,
                     const TrainConfig& cfg);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<HistoryRow>& history);

} // namespace cwica
