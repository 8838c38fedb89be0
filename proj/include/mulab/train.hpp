#pragma once

#include <cstdint>
#include <vector>

#include "mulab/dataset.hpp"
#include "mulab/model.hpp"

namespace mulab {

struct TrainConfig {
    std::vector<std::size_t> architecture; ///< full width chain [input, hidden..., classes]
    std::size_t epochs = 1;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

/// Throws ConfigError on non-positive epochs/batch size/learning rate or a
/// width chain shorter than [input, classes].
void check_train_config(const TrainConfig& config);

/// Mini-batch SGD on mean cross-entropy. Fresh model per call, seeded init,
/// per-epoch reshuffle. Throws ShapeError when the architecture does not
/// match the dataset, DivergenceError when the loss goes non-finite.
Model train(const Dataset& dataset, const TrainConfig& config);

/// The gold-standard comparator: train from scratch on the remaining data.
Model retrain(const Dataset& remaining, const TrainConfig& config);

/// One epoch of cross-entropy SGD over the dataset on an existing model.
/// Returns the mean per-batch loss. Shared by train, finetuning and
/// relearning so every loop sees the same batch schedule for a given seed.
double run_ce_epoch(Model& model, const Dataset& dataset, OptimizerState& opt,
                    std::uint64_t seed, std::size_t epoch, std::size_t batch_size);

/// Batch schedule for one epoch: the caller's seed salted with the epoch.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t count, std::size_t batch_size,
                                                    std::uint64_t seed, std::size_t epoch);

} // namespace mulab
