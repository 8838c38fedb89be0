#include "mulab/counterfactual.hpp"

#include <string>

#include "mulab/errors.hpp"
#include "mulab/rng.hpp"

namespace mulab {

JointDataset prepare_joint(const Dataset& forgetting, const Dataset& remaining, std::uint64_t seed,
                           std::optional<std::size_t> oversample_to) {
    if (remaining.empty()) {
        throw DomainError("prepare_joint: remaining data is empty");
    }
    if (remaining.num_classes < 2) {
        throw DomainError("prepare_joint: need at least 2 classes to draw a replacement label");
    }
    if (!forgetting.empty() && forgetting.dim() != remaining.dim()) {
        throw ShapeError("prepare_joint: forgetting dim " + std::to_string(forgetting.dim()) +
                         " != remaining dim " + std::to_string(remaining.dim()));
    }

    const std::size_t count = oversample_to.value_or(forgetting.size());
    if (count > 0 && forgetting.empty()) {
        throw DomainError("prepare_joint: cannot oversample an empty forgetting set");
    }

    JointDataset joint;
    joint.dim = remaining.dim();
    joint.num_classes = remaining.num_classes;
    joint.tuples.reserve(count);

    Rng pair_rng = Rng::stream(seed, Stream::TuplePair);
    Rng mask_rng = Rng::stream(seed, Stream::TupleMask);
    Rng label_rng = Rng::stream(seed, Stream::TupleLabel);

    const std::size_t d = joint.dim;
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t f_idx = t % forgetting.size(); // round-robin when oversampling
        TupleExample tuple;
        tuple.forgetting_x.assign(forgetting.features.row(f_idx).begin(), forgetting.features.row(f_idx).end());
        tuple.forgetting_y = forgetting.labels[f_idx];

        const auto r_idx = static_cast<std::size_t>(pair_rng.below(remaining.size()));
        tuple.remaining_x.assign(remaining.features.row(r_idx).begin(), remaining.features.row(r_idx).end());
        tuple.remaining_y = remaining.labels[r_idx];

        tuple.mask.resize(d);
        tuple.counterfactual_x.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            tuple.mask[j] = mask_rng.uniform();
            tuple.counterfactual_x[j] = tuple.remaining_x[j] + tuple.mask[j];
        }

        // uniform over the num_classes - 1 labels excluding forgetting_y
        auto draw = static_cast<int>(label_rng.below(static_cast<std::uint64_t>(joint.num_classes - 1)));
        tuple.counterfactual_y = draw >= tuple.forgetting_y ? draw + 1 : draw;

        joint.tuples.push_back(std::move(tuple));
    }
    return joint;
}

TupleBatch gather_tuples(const JointDataset& joint, const std::vector<std::size_t>& indices) {
    TupleBatch batch;
    const std::size_t n = indices.size();
    const std::size_t d = joint.dim;
    batch.forgetting_x = Tensor(n, d);
    batch.remaining_x = Tensor(n, d);
    batch.counterfactual_x = Tensor(n, d);
    batch.forgetting_y.reserve(n);
    batch.remaining_y.reserve(n);
    batch.counterfactual_y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TupleExample& tuple = joint.tuples[indices[i]];
        for (std::size_t j = 0; j < d; ++j) {
            batch.forgetting_x(i, j) = tuple.forgetting_x[j];
            batch.remaining_x(i, j) = tuple.remaining_x[j];
            batch.counterfactual_x(i, j) = tuple.counterfactual_x[j];
        }
        batch.forgetting_y.push_back(tuple.forgetting_y);
        batch.remaining_y.push_back(tuple.remaining_y);
        batch.counterfactual_y.push_back(tuple.counterfactual_y);
    }
    return batch;
}

} // namespace mulab
