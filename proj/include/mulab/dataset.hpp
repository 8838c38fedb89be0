#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mulab/tensor.hpp"

namespace mulab {

/// Labeled feature matrix. Features live in [0, 1] after load/synthesis.
struct Dataset {
    Tensor features;         ///< n x d
    std::vector<int> labels; ///< size n, each in [0, num_classes)
    int num_classes = 0;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
    bool empty() const { return size() == 0; }
};

/// Throws DomainError/ShapeError if the dataset breaks its invariants
/// (label range, feature range, row/label count agreement).
void validate_dataset(const Dataset& dataset);

/// Rows of `dataset` selected by index, in the given order.
Dataset take_rows(const Dataset& dataset, const std::vector<std::size_t>& indices);

/// Rows whose label passes (keep == true) or fails (keep == false) membership
/// in `class_ids`.
Dataset filter_by_class(const Dataset& dataset, const std::vector<int>& class_ids, bool keep);

enum class SplitMode { RandomFraction, ClassRemoval };

/// How the forgetting set is carved out of the training data.
struct SplitSpec {
    SplitMode mode = SplitMode::RandomFraction;
    double fraction = 0.0;          ///< RandomFraction: share of rows in F, in (0,1)
    std::vector<int> class_ids;     ///< ClassRemoval: labels whose rows form F
    std::uint64_t seed = 0;
};

struct SplitResult {
    Dataset forgetting;
    Dataset remaining;
    std::vector<std::size_t> forgetting_indices;
    std::vector<std::size_t> remaining_indices;
};

/// Partitions the dataset into disjoint, jointly exhaustive (F, R).
/// RandomFraction picks round(fraction * n) rows by seeded shuffle;
/// ClassRemoval puts every row labeled in class_ids into F.
SplitResult split(const Dataset& dataset, const SplitSpec& spec);

/// Gaussian clusters with distinct means (drawn uniformly from the unit
/// cube), min-max normalized to [0, 1]. Deterministic per seed. Rows are
/// grouped by class.
Dataset synth_blobs(int num_classes, int per_class, int dim, double spread, std::uint64_t seed);

struct TrainTestSplit {
    Dataset train;
    Dataset test;
};

/// Holds out the last `test_per_class` rows of every class as a test set.
/// Pair with synth_blobs to get train and test data over the same clusters.
TrainTestSplit holdout_last_per_class(const Dataset& dataset, int test_per_class);

/// Seeded permutation of [0, count) chunked into batches; the final short
/// batch is kept. Salt the seed per epoch for reshuffling epochs.
std::vector<std::vector<std::size_t>> batches(std::size_t count, std::size_t batch_size, std::uint64_t seed);

/// Writes "f0,...,f{d-1},label" rows for inspection or external tooling.
void save_csv(const Dataset& dataset, const std::string& path);

} // namespace mulab
