#include "mulab/train.hpp"

#include <cmath>
#include <string>

#include "mulab/errors.hpp"
#include "mulab/losses.hpp"
#include "mulab/rng.hpp"

namespace mulab {

void check_train_config(const TrainConfig& config) {
    if (config.architecture.size() < 2) {
        throw ConfigError("train: architecture needs at least [input, classes]");
    }
    if (config.epochs < 1) throw ConfigError("train: epochs must be at least 1");
    if (config.batch_size < 1) throw ConfigError("train: batch_size must be at least 1");
    if (!(config.learning_rate >= 0.0)) throw ConfigError("train: learning rate must be non-negative");
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t count, std::size_t batch_size,
                                                    std::uint64_t seed, std::size_t epoch) {
    return batches(count, batch_size, combine_seed(seed, 0x45504f43ULL + epoch));
}

namespace {

Tensor gather_features(const Dataset& dataset, const std::vector<std::size_t>& indices) {
    Tensor out(indices.size(), dataset.dim());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        for (std::size_t j = 0; j < dataset.dim(); ++j) {
            out(i, j) = dataset.features(indices[i], j);
        }
    }
    return out;
}

std::vector<int> gather_labels(const Dataset& dataset, const std::vector<std::size_t>& indices) {
    std::vector<int> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = dataset.labels[indices[i]];
    return out;
}

} // namespace

double run_ce_epoch(Model& model, const Dataset& dataset, OptimizerState& opt,
                    std::uint64_t seed, std::size_t epoch, std::size_t batch_size) {
    double loss_sum = 0.0;
    std::size_t batch_count = 0;
    for (const auto& batch_indices : epoch_batches(dataset.size(), batch_size, seed, epoch)) {
        Tensor x = gather_features(dataset, batch_indices);
        std::vector<int> y = gather_labels(dataset, batch_indices);
        ForwardTrace trace = forward_with_representation(model, x);
        CrossEntropyResult ce = cross_entropy(trace.logits, y);
        if (!std::isfinite(ce.value)) {
            throw DivergenceError("cross-entropy loss became non-finite at epoch " + std::to_string(epoch));
        }
        backward_and_step(model, trace, ce.dlogits, opt);
        loss_sum += ce.value;
        ++batch_count;
    }
    return batch_count > 0 ? loss_sum / static_cast<double>(batch_count) : 0.0;
}

Model train(const Dataset& dataset, const TrainConfig& config) {
    check_train_config(config);
    if (dataset.empty()) throw DomainError("train: dataset is empty");
    if (config.architecture.front() != dataset.dim()) {
        throw ShapeError("train: architecture input width " + std::to_string(config.architecture.front()) +
                         " != feature width " + std::to_string(dataset.dim()));
    }
    if (config.architecture.back() < static_cast<std::size_t>(dataset.num_classes)) {
        throw ShapeError("train: architecture output width " + std::to_string(config.architecture.back()) +
                         " < num_classes " + std::to_string(dataset.num_classes));
    }
    Model model = make_mlp(config.architecture, config.seed);
    OptimizerState opt(model, config.learning_rate);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        run_ce_epoch(model, dataset, opt, config.seed, epoch, config.batch_size);
    }
    return model;
}

Model retrain(const Dataset& remaining, const TrainConfig& config) {
    return train(remaining, config);
}

} // namespace mulab
