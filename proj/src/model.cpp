#include "mulab/model.hpp"

#include <cmath>
#include <string>

#include "mulab/errors.hpp"
#include "mulab/rng.hpp"

namespace mulab {

namespace {

Tensor apply_activation(const Tensor& pre, Activation act) {
    if (act == Activation::Identity) return pre;
    Tensor out = pre;
    for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
    return out;
}

// dL/d(pre) from dL/d(post) and the cached pre-activation
void activation_backward_inplace(Tensor& dpost, const Tensor& pre, Activation act) {
    if (act == Activation::Identity) return;
    for (std::size_t i = 0; i < dpost.size(); ++i) {
        if (pre.values()[i] <= 0.0) dpost.values()[i] = 0.0;
    }
}

void check_trace(const Model& model, const ForwardTrace& trace) {
    if (trace.layer_inputs.empty() && model.layer_count() > 0) {
        throw StateError("backward: missing forward trace");
    }
    if (trace.model_revision != model.revision) {
        throw StateError("backward: stale forward trace (model revision " +
                         std::to_string(model.revision) + ", trace revision " +
                         std::to_string(trace.model_revision) + ")");
    }
}

// walks layers [last..first] of one section, filling grads at global layer offsets
Tensor backward_section(const Model& model, const ForwardTrace& trace, GradientSet& grads,
                        Tensor dpost, std::size_t first, std::size_t count) {
    for (std::size_t n = count; n > 0; --n) {
        const std::size_t i = first + n - 1;
        const Layer& layer = model.layer(i);
        activation_backward_inplace(dpost, trace.pre_activations[i], layer.activation);
        Tensor dw = matmul_at_b(trace.layer_inputs[i], dpost);
        for (std::size_t k = 0; k < dw.size(); ++k) grads.d_weight[i].values()[k] += dw.values()[k];
        Tensor db = column_sums(dpost);
        for (std::size_t j = 0; j < db.cols(); ++j) grads.d_bias[i](0, j) += db(0, j);
        if (n > 1 || first > 0) {
            dpost = matmul_a_bt(dpost, layer.weight);
        }
    }
    return dpost;
}

} // namespace

Model make_mlp(const std::vector<std::size_t>& widths, std::uint64_t seed) {
    if (widths.size() < 2) {
        throw ConfigError("make_mlp: need at least [input, classes] widths");
    }
    for (std::size_t w : widths) {
        if (w == 0) throw ConfigError("make_mlp: zero layer width");
    }
    Model model;
    model.input_dim = widths.front();
    model.num_classes = widths.back();
    model.representation_dim = widths[widths.size() - 2];

    Rng rng = Rng::stream(seed, Stream::ModelInit);
    auto make_layer = [&](std::size_t in, std::size_t out, Activation act) {
        Layer layer;
        layer.weight = Tensor(in, out);
        const double scale = std::sqrt(2.0 / static_cast<double>(in));
        for (double& v : layer.weight.values()) v = scale * rng.normal();
        layer.bias = Tensor(1, out);
        layer.activation = act;
        return layer;
    };

    // hidden chain: ReLU after each but the last hidden layer, which stays
    // linear so the representation is an unbounded score vector
    const std::size_t hidden = widths.size() - 2;
    for (std::size_t i = 0; i < hidden; ++i) {
        Activation act = (i + 1 < hidden) ? Activation::Relu : Activation::Identity;
        model.extractor.push_back(make_layer(widths[i], widths[i + 1], act));
    }
    model.head.push_back(make_layer(widths[widths.size() - 2], widths.back(), Activation::Identity));
    return model;
}

ForwardTrace forward_with_representation(const Model& model, const Tensor& batch) {
    if (batch.cols() != model.input_dim) {
        throw ShapeError("forward: batch width " + std::to_string(batch.cols()) +
                         " != model input width " + std::to_string(model.input_dim));
    }
    ForwardTrace trace;
    trace.model_revision = model.revision;
    trace.batch_size = batch.rows();
    trace.layer_inputs.reserve(model.layer_count());
    trace.pre_activations.reserve(model.layer_count());

    Tensor current = batch;
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
        const Layer& layer = model.layer(i);
        if (current.cols() != layer.weight.rows()) {
            throw ShapeError("forward: layer " + std::to_string(i) + " expects width " +
                             std::to_string(layer.weight.rows()) + ", got " + std::to_string(current.cols()));
        }
        trace.layer_inputs.push_back(current);
        Tensor pre = matmul(current, layer.weight);
        add_row_inplace(pre, layer.bias);
        trace.pre_activations.push_back(pre);
        current = apply_activation(pre, layer.activation);
        if (i + 1 == model.extractor.size()) {
            trace.representation = current;
        }
    }
    if (model.extractor.empty()) {
        trace.representation = batch; // degenerate model: representation is the input
    }
    trace.logits = current;
    return trace;
}

GradientSet GradientSet::zeros_like(const Model& model) {
    GradientSet grads;
    grads.d_weight.reserve(model.layer_count());
    grads.d_bias.reserve(model.layer_count());
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
        const Layer& layer = model.layer(i);
        grads.d_weight.emplace_back(layer.weight.rows(), layer.weight.cols());
        grads.d_bias.emplace_back(1, layer.bias.cols());
    }
    return grads;
}

void GradientSet::add(const GradientSet& other) {
    for (std::size_t i = 0; i < d_weight.size(); ++i) {
        for (std::size_t k = 0; k < d_weight[i].size(); ++k) {
            d_weight[i].values()[k] += other.d_weight[i].values()[k];
        }
        for (std::size_t k = 0; k < d_bias[i].size(); ++k) {
            d_bias[i].values()[k] += other.d_bias[i].values()[k];
        }
    }
}

void GradientSet::scale(double factor) {
    for (auto& t : d_weight) {
        for (double& v : t.values()) v *= factor;
    }
    for (auto& t : d_bias) {
        for (double& v : t.values()) v *= factor;
    }
}

GradientSet backward_from_logits(const Model& model, const ForwardTrace& trace, const Tensor& dlogits) {
    check_trace(model, trace);
    if (dlogits.rows() != trace.batch_size || dlogits.cols() != model.num_classes) {
        throw ShapeError("backward_from_logits: gradient shape mismatch");
    }
    GradientSet grads = GradientSet::zeros_like(model);
    Tensor dcur = backward_section(model, trace, grads, dlogits, model.extractor.size(), model.head.size());
    if (!model.extractor.empty()) {
        backward_section(model, trace, grads, std::move(dcur), 0, model.extractor.size());
    }
    return grads;
}

GradientSet backward_from_representation(const Model& model, const ForwardTrace& trace, const Tensor& drep) {
    check_trace(model, trace);
    if (drep.rows() != trace.batch_size || drep.cols() != model.representation_dim) {
        throw ShapeError("backward_from_representation: gradient shape mismatch");
    }
    GradientSet grads = GradientSet::zeros_like(model);
    if (!model.extractor.empty()) {
        backward_section(model, trace, grads, drep, 0, model.extractor.size());
    }
    return grads;
}

OptimizerState::OptimizerState(const Model& model, double learning_rate)
    : learning_rate_(learning_rate), accumulated_(GradientSet::zeros_like(model)) {
    if (!(learning_rate >= 0.0)) {
        throw ConfigError("OptimizerState: learning rate must be non-negative");
    }
}

void OptimizerState::zero() {
    for (auto& t : accumulated_.d_weight) {
        for (double& v : t.values()) v = 0.0;
    }
    for (auto& t : accumulated_.d_bias) {
        for (double& v : t.values()) v = 0.0;
    }
}

void OptimizerState::accumulate(const GradientSet& gradients) {
    if (gradients.d_weight.size() != accumulated_.d_weight.size()) {
        throw ShapeError("OptimizerState::accumulate: layer count mismatch");
    }
    accumulated_.add(gradients);
}

void OptimizerState::step(Model& model) {
    if (accumulated_.d_weight.size() != model.layer_count()) {
        throw ShapeError("OptimizerState::step: accumulator/model layer count mismatch");
    }
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
        Layer& layer = model.layer(i);
        if (!layer.weight.same_shape(accumulated_.d_weight[i]) || !layer.bias.same_shape(accumulated_.d_bias[i])) {
            throw ShapeError("OptimizerState::step: accumulator shape mismatch at layer " + std::to_string(i));
        }
        for (std::size_t k = 0; k < layer.weight.size(); ++k) {
            layer.weight.values()[k] -= learning_rate_ * accumulated_.d_weight[i].values()[k];
        }
        for (std::size_t k = 0; k < layer.bias.size(); ++k) {
            layer.bias.values()[k] -= learning_rate_ * accumulated_.d_bias[i].values()[k];
        }
    }
    ++model.revision;
    zero();
}

void backward_and_step(Model& model, const ForwardTrace& trace, const Tensor& dlogits, OptimizerState& opt) {
    opt.accumulate(backward_from_logits(model, trace, dlogits));
    opt.step(model);
}

} // namespace mulab
