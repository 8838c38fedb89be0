#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mulab/dataset.hpp"
#include "mulab/tensor.hpp"

namespace mulab {

/// One (forgetting, remaining, counterfactual) triple. The counterfactual
/// features are the paired remaining features plus a uniform [0,1] mask, and
/// its label is drawn uniformly from the classes other than the forgetting
/// label. Counterfactual features are intentionally not clamped back into
/// [0, 1]; only the mask range is constrained.
struct TupleExample {
    std::vector<double> forgetting_x;
    int forgetting_y = 0;
    std::vector<double> remaining_x;
    int remaining_y = 0;
    std::vector<double> counterfactual_x;
    int counterfactual_y = 0;
    std::vector<double> mask;
};

/// The joint dataset driving the unlearning losses.
struct JointDataset {
    std::vector<TupleExample> tuples;
    std::size_t dim = 0;
    int num_classes = 0;

    std::size_t size() const { return tuples.size(); }
};

/// Builds one tuple per forgetting sample: the remaining partner is drawn
/// uniformly with replacement, the mask elementwise uniform [0,1], the
/// replacement label uniform over the other classes. When oversample_to is
/// set, forgetting samples are replicated round-robin up to that size, each
/// replica with fresh draws. Deterministic per seed via dedicated streams
/// for partner, mask, and label.
JointDataset prepare_joint(const Dataset& forgetting, const Dataset& remaining, std::uint64_t seed,
                           std::optional<std::size_t> oversample_to = std::nullopt);

/// Column-stacked views over a set of tuples, for batched passes.
struct TupleBatch {
    Tensor forgetting_x;          ///< batch x d
    Tensor remaining_x;           ///< batch x d
    Tensor counterfactual_x;      ///< batch x d
    std::vector<int> forgetting_y;
    std::vector<int> remaining_y;
    std::vector<int> counterfactual_y;
};

TupleBatch gather_tuples(const JointDataset& joint, const std::vector<std::size_t>& indices);

} // namespace mulab
