#pragma once

#include <cstdint>
#include <vector>

#include "mulab/tensor.hpp"

namespace mulab {

enum class Activation { Identity, Relu };

struct Layer {
    Tensor weight; ///< in x out
    Tensor bias;   ///< 1 x out
    Activation activation = Activation::Identity;
};

/// Feedforward network split into a feature extractor and a classifier head.
/// The extractor output is the representation; the head maps it to logits.
///
/// Copies are deep and independent: mutating a copy never touches the
/// original. The revision counter ties cached forward traces to the exact
/// parameter state they were computed from.
struct Model {
    std::vector<Layer> extractor;
    std::vector<Layer> head;
    std::size_t input_dim = 0;
    std::size_t representation_dim = 0;
    std::size_t num_classes = 0;
    std::uint64_t revision = 0;

    std::size_t layer_count() const { return extractor.size() + head.size(); }
    const Layer& layer(std::size_t i) const {
        return i < extractor.size() ? extractor[i] : head[i - extractor.size()];
    }
    Layer& layer(std::size_t i) {
        return i < extractor.size() ? extractor[i] : head[i - extractor.size()];
    }
};

/// MLP from a width chain [input, hidden..., classes]. ReLU between hidden
/// layers, linear final layers for extractor and head. The head is the last
/// linear layer; everything before it is the extractor, so the
/// representation width is the last hidden width (or the input width when
/// there are no hidden layers). Weights: scaled normal init, zero biases.
Model make_mlp(const std::vector<std::size_t>& widths, std::uint64_t seed);

/// Forward pass cache. Holds the representation and logits for the batch
/// plus everything backward needs (per-layer inputs and pre-activations).
struct ForwardTrace {
    Tensor representation; ///< batch x representation_dim
    Tensor logits;         ///< batch x num_classes
    std::vector<Tensor> layer_inputs;
    std::vector<Tensor> pre_activations;
    std::uint64_t model_revision = 0;
    std::size_t batch_size = 0;
};

/// Runs batch (n x input_dim) through extractor and head.
/// Throws ShapeError naming the offending layer on width mismatch.
ForwardTrace forward_with_representation(const Model& model, const Tensor& batch);

/// Per-parameter gradients, mirroring the model's layer shapes.
struct GradientSet {
    std::vector<Tensor> d_weight;
    std::vector<Tensor> d_bias;

    static GradientSet zeros_like(const Model& model);
    void add(const GradientSet& other);
    void scale(double factor);
};

/// Reverse-mode gradients from d(loss)/d(logits) through head and extractor.
/// Throws StateError if the trace is stale (model updated since the forward).
GradientSet backward_from_logits(const Model& model, const ForwardTrace& trace, const Tensor& dlogits);

/// Reverse-mode gradients from d(loss)/d(representation) through the
/// extractor only; head gradients stay zero.
GradientSet backward_from_representation(const Model& model, const ForwardTrace& trace, const Tensor& drep);

/// Plain SGD state: learning rate plus gradient accumulators shaped like the
/// model. Accumulate gradients from one or more backward passes, then step.
class OptimizerState {
public:
    OptimizerState(const Model& model, double learning_rate);

    double learning_rate() const { return learning_rate_; }
    const GradientSet& gradients() const { return accumulated_; }

    void zero();
    void accumulate(const GradientSet& gradients);

    /// p <- p - lr * dp for every parameter; bumps the model revision and
    /// zeroes the accumulators for the next batch.
    void step(Model& model);

private:
    double learning_rate_;
    GradientSet accumulated_;
};

/// backward_from_logits + accumulate + step in one call, for plain
/// cross-entropy training loops.
void backward_and_step(Model& model, const ForwardTrace& trace, const Tensor& dlogits, OptimizerState& opt);

} // namespace mulab
