#pragma once

#include <cstdint>
#include <vector>

#include "mulab/counterfactual.hpp"
#include "mulab/dataset.hpp"
#include "mulab/model.hpp"

namespace mulab {

struct UnlearnConfig {
    std::size_t epochs = 5; ///< removal epochs T
    double learning_rate = 0.001;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    bool use_counterfactual = true;   ///< counterfactual KL + CE terms on the forgetting inputs
    bool use_repr_alignment = true;   ///< representation-alignment KL term on the remaining inputs
};

void check_unlearn_config(const UnlearnConfig& config);

struct EpochLoss {
    double kl = 0.0;
    double ce = 0.0;
};

/// Forward passes that fed a gradient computation, by input kind. Lets
/// callers verify which data actually influenced an unlearning run.
struct ForwardCounts {
    std::size_t forgetting = 0;
    std::size_t counterfactual = 0;
    std::size_t remaining = 0;
};

struct UnlearnResult {
    Model model;
    double wall_time_seconds = 0.0;
    std::vector<EpochLoss> loss_trace; ///< one entry per epoch
    ForwardCounts forwards;
};

struct ObjectiveResult {
    double value = 0.0;
    GradientSet gradients; ///< w.r.t. the unlearning model's parameters
};

/// Representation-alignment objective on one tuple batch:
///   KL(rep_u(F) || rep_u(F*))   [use_counterfactual; gradients through both branches]
/// + KL(rep_u(R*) || rep_o(R*))  [use_repr_alignment; pre-unlearning target frozen]
ObjectiveResult camu_kl_objective(const Model& unlearning, const Model& original, const TupleBatch& batch,
                                  const UnlearnConfig& config, ForwardCounts* counts = nullptr);

/// Output-alignment objective on one tuple batch:
///   CE(g_u(x_f), y_f*)    [use_counterfactual]
/// + CE(g_u(x_r*), y_r*)   [always on]
ObjectiveResult camu_ce_objective(const Model& unlearning, const TupleBatch& batch,
                                  const UnlearnConfig& config, ForwardCounts* counts = nullptr);

/// Counterfactual unlearning: clones the original model, then for each of T
/// epochs walks the tuple batches taking one step on the KL objective
/// followed by one step on the CE objective. The KL-then-CE order within a
/// batch is part of the contract.
UnlearnResult camu(const Model& original, const JointDataset& joint, const UnlearnConfig& config);

/// Baseline: clone and run plain cross-entropy epochs on the remaining data.
UnlearnResult finetune(const Model& original, const Dataset& remaining, const UnlearnConfig& config);

/// Baseline: per batch pair, one step on CE(remaining) - w * CE(forgetting).
/// Forgetting batches cycle when the remaining data has more batches.
UnlearnResult neg_grad(const Model& original, const Dataset& forgetting, const Dataset& remaining,
                       const UnlearnConfig& config, double negative_weight = 1.0);

} // namespace mulab
