#pragma once

#include <cstddef>
#include <vector>

#include "cwica/matrix.hpp"
#include "cwica/rng.hpp"

namespace cwica {

enum class Activation { tanh_fn, relu, linear };

/// Feed-forward architecture: layer_sizes = (input, hidden..., output).
/// One activation per hidden layer; the output layer is always linear.
struct MlpSpec {
    std::vector<std::size_t> layer_sizes;
    std::vector<Activation> hidden_activations;

    MlpSpec() = default;
    MlpSpec(std::vector<std::size_t> sizes, Activation hidden = Activation::tanh_fn);

    std::size_t num_layers() const { return layer_sizes.size() - 1; }
    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    /// Activation applied after layer `l` (linear for the last).
    Activation activation_at(std::size_t l) const;
    void validate() const;
};

/// Weights and biases; also reused as the container for gradients and for
/// Adam moment accumulators (the shapes are identical by construction).
struct MlpParams {
    std::vector<Matrix> weights;              // per layer, in x out
    std::vector<std::vector<double>> biases;  // per layer, out

    static MlpParams zeros_like(const MlpSpec& spec);
    bool same_shape(const MlpParams& other) const;
    std::size_t count() const;

    /// Flattened view in a fixed order (layer by layer, weights then bias);
    /// used by checkpoints and by the finite-difference tests.
    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& flat);
    double* param_at(std::size_t flat_index);
};

/// Symmetric uniform fan-in/fan-out initialization, range
/// +-sqrt(6 / (fan_in + fan_out)); biases start at zero.
MlpParams init_params(const MlpSpec& spec, Rng& rng);

/// Forward pass; rows of x are samples.
Matrix mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& x);

/// Alias matching the encoder role.
inline Matrix encode(const MlpParams& params, const MlpSpec& spec, const Matrix& x) {
    return mlp_forward(params, spec, x);
}

/// Activations kept for reverse-mode accumulation. layer_inputs[l] is the
/// input of layer l; layer_inputs.back() is the network output.
struct ForwardTrace {
    std::vector<Matrix> layer_inputs;
    const Matrix& output() const { return layer_inputs.back(); }
};

ForwardTrace mlp_forward_trace(const MlpParams& params, const MlpSpec& spec,
                               const Matrix& x);

/// Reverse pass: given dL/d(output), accumulates parameter gradients into
/// `grads` (+=) and returns dL/d(input).
Matrix mlp_backward(const MlpParams& params, const MlpSpec& spec,
                    const ForwardTrace& trace, const Matrix& grad_output,
                    MlpParams& grads);

/// Sum over samples of the squared reconstruction residual.
double rec_error(const Matrix& x, const Matrix& xhat);

} // namespace cwica
