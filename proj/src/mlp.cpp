#include "cwica/mlp.hpp"

#include <cmath>

namespace cwica {

MlpSpec::MlpSpec(std::vector<std::size_t> sizes, Activation hidden)
    : layer_sizes(std::move(sizes)) {
    if (layer_sizes.size() >= 2)
        hidden_activations.assign(layer_sizes.size() - 2, hidden);
    validate();
}

Activation MlpSpec::activation_at(std::size_t l) const {
    if (l + 1 == num_layers()) return Activation::linear;
    return hidden_activations[l];
}

void MlpSpec::validate() const {
    if (layer_sizes.size() < 2)
        throw dimension_error("MlpSpec: need at least input and output sizes");
    for (std::size_t s : layer_sizes)
        if (s < 1) throw dimension_error("MlpSpec: all layer sizes must be >= 1");
    if (hidden_activations.size() != layer_sizes.size() - 2)
        throw dimension_error("MlpSpec: one activation per hidden layer required");
}

MlpParams MlpParams::zeros_like(const MlpSpec& spec) {
    MlpParams p;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        p.weights.emplace_back(spec.layer_sizes[l], spec.layer_sizes[l + 1], 0.0);
        p.biases.emplace_back(spec.layer_sizes[l + 1], 0.0);
    }
    return p;
}

bool MlpParams::same_shape(const MlpParams& other) const {
    if (weights.size() != other.weights.size()) return false;
    for (std::size_t l = 0; l < weights.size(); ++l)
        if (!weights[l].same_shape(other.weights[l]) ||
            biases[l].size() != other.biases[l].size())
            return false;
    return true;
}

std::size_t MlpParams::count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].size() + biases[l].size();
    return n;
}

std::vector<double> MlpParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(count());
    for (std::size_t l = 0; l < weights.size(); ++l) {
        flat.insert(flat.end(), weights[l].data().begin(), weights[l].data().end());
        flat.insert(flat.end(), biases[l].begin(), biases[l].end());
    }
    return flat;
}

void MlpParams::unflatten(const std::vector<double>& flat) {
    if (flat.size() != count())
        throw dimension_error("MlpParams::unflatten: size mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (double& v : weights[l].data()) v = flat[k++];
        for (double& v : biases[l]) v = flat[k++];
    }
}

double* MlpParams::param_at(std::size_t flat_index) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (flat_index < weights[l].size())
            return weights[l].data().data() + flat_index;
        flat_index -= weights[l].size();
        if (flat_index < biases[l].size()) return biases[l].data() + flat_index;
        flat_index -= biases[l].size();
    }
    throw dimension_error("MlpParams::param_at: index out of range");
}

MlpParams init_params(const MlpSpec& spec, Rng& rng) {
    spec.validate();
    MlpParams p = MlpParams::zeros_like(spec);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const double fan_in = static_cast<double>(spec.layer_sizes[l]);
        const double fan_out = static_cast<double>(spec.layer_sizes[l + 1]);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& w : p.weights[l].data()) w = rng.uniform(-bound, bound);
    }
    return p;
}

namespace {

void apply_activation(Matrix& m, Activation act) {
    switch (act) {
    case Activation::tanh_fn:
        for (double& v : m.data()) v = std::tanh(v);
        break;
    case Activation::relu:
        for (double& v : m.data())
            if (v < 0.0) v = 0.0;
        break;
    case Activation::linear:
        break;
    }
}

Matrix affine(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    Matrix out = matmul(x, w);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* r = out.row(i).data();
        for (std::size_t j = 0; j < out.cols(); ++j) r[j] += b[j];
    }
    return out;
}

} // namespace

ForwardTrace mlp_forward_trace(const MlpParams& params, const MlpSpec& spec,
                               const Matrix& x) {
    if (x.cols() != spec.input_size())
        throw dimension_error("mlp_forward: input width does not match spec");
    ForwardTrace trace;
    trace.layer_inputs.reserve(spec.num_layers() + 1);
    trace.layer_inputs.push_back(x);
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        Matrix h = affine(trace.layer_inputs.back(), params.weights[l], params.biases[l]);
        apply_activation(h, spec.activation_at(l));
        trace.layer_inputs.push_back(std::move(h));
    }
    return trace;
}

Matrix mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& x) {
    if (x.cols() != spec.input_size())
        throw dimension_error("mlp_forward: input width does not match spec");
    Matrix h = x;
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        h = affine(h, params.weights[l], params.biases[l]);
        apply_activation(h, spec.activation_at(l));
    }
    return h;
}

Matrix mlp_backward(const MlpParams& params, const MlpSpec& spec,
                    const ForwardTrace& trace, const Matrix& grad_output,
                    MlpParams& grads) {
    Matrix g = grad_output; // dL/d(post-activation of current layer)
    for (std::size_t l = spec.num_layers(); l-- > 0;) {
        const Matrix& input = trace.layer_inputs[l];
        const Matrix& output = trace.layer_inputs[l + 1];
        // through the activation (tanh' recovered from its own output)
        switch (spec.activation_at(l)) {
        case Activation::tanh_fn:
            for (std::size_t k = 0; k < g.size(); ++k)
                g.data()[k] *= 1.0 - output.data()[k] * output.data()[k];
            break;
        case Activation::relu:
            for (std::size_t k = 0; k < g.size(); ++k)
                if (output.data()[k] <= 0.0) g.data()[k] = 0.0;
            break;
        case Activation::linear:
            break;
        }
        // parameter gradients
        Matrix dw = matmul(input.transposed(), g);
        for (std::size_t k = 0; k < dw.size(); ++k)
            grads.weights[l].data()[k] += dw.data()[k];
        for (std::size_t i = 0; i < g.rows(); ++i) {
            const double* r = g.row(i).data();
            for (std::size_t j = 0; j < g.cols(); ++j) grads.biases[l][j] += r[j];
        }
        if (l > 0) g = matmul(g, params.weights[l].transposed());
    }
    return matmul(g, params.weights[0].transposed());
}

double rec_error(const Matrix& x, const Matrix& xhat) {
    if (!x.same_shape(xhat))
        throw dimension_error("rec_error: shape mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x.data()[k] - xhat.data()[k];
        s += diff * diff;
    }
    return s;
}

} // namespace cwica
