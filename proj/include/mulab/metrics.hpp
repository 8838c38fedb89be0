#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mulab/dataset.hpp"
#include "mulab/model.hpp"
#include "mulab/unlearn.hpp"

namespace mulab {

enum class TaskKind { RandomRemoval, ClassRemoval };

std::string task_name(TaskKind task);

/// Per-(method, seed) metric row. Only the declared task's accuracy metrics
/// are populated: random removal fills r_train/f_train/test, class removal
/// fills r_test/f_test. Percentages throughout.
struct MetricsReport {
    std::string method;
    TaskKind task = TaskKind::RandomRemoval;
    std::vector<std::uint64_t> seeds; ///< one entry per run; several after averaging
    std::optional<double> r_train;    ///< accuracy on remaining training data
    std::optional<double> f_train;    ///< accuracy on forgetting training data
    std::optional<double> test;       ///< accuracy on the full test set
    std::optional<double> r_test;     ///< test accuracy on remaining classes
    std::optional<double> f_test;     ///< test accuracy on forgotten classes
    double mia = 0.0;                 ///< inference-attack balanced accuracy
    double wall_time_seconds = 0.0;
};

/// The splits one task run evaluates against.
struct TaskSplits {
    Dataset forgetting;
    Dataset remaining;
    Dataset test;
    TaskKind task = TaskKind::RandomRemoval;
    std::vector<int> forgotten_classes; ///< ClassRemoval only
};

/// 100 * correct / n with argmax ties broken toward the lowest class index.
/// Throws DomainError on an empty dataset.
double accuracy(const Model& model, const Dataset& dataset);

/// Loss-threshold membership inference. Splits both loss vectors 50/50 into
/// calibration and holdout halves (seeded), picks the threshold maximizing
/// balanced accuracy on the calibration halves ("member" = loss at or below
/// the threshold), and returns the holdout balanced accuracy as a
/// percentage. Values below 50 are possible and preserved.
double mia_from_losses(const std::vector<double>& member_losses, const std::vector<double>& nonmember_losses,
                       std::uint64_t seed);

/// mia_from_losses on per-sample cross-entropy of the two datasets.
/// Throws DomainError when either set has fewer than 2 samples.
double mia_success_rate(const Model& model, const Dataset& members, const Dataset& nonmembers,
                        std::uint64_t seed);

/// Fills the metric set of the split's task for the given model. Members of
/// the inference attack are the forgetting training samples; non-members are
/// an equal-size seeded sample of the test set.
MetricsReport evaluate(const std::string& method, const Model& model, const TaskSplits& splits,
                       std::uint64_t seed, double wall_time_seconds);

/// Accuracy gap trajectory while finetuning a post-unlearning model on the
/// remaining data: entry 0 is the pre-relearn gap, entry t the gap after
/// epoch t. Random removal tracks train accuracies (remaining - forgetting);
/// class removal tracks the per-class test accuracies.
struct RelearnCurve {
    std::vector<double> gaps;
};

struct RelearnConfig {
    std::size_t epochs = 5;
    double learning_rate = 0.001;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

RelearnCurve relearn_curve(const Model& unlearned, const TaskSplits& splits, const RelearnConfig& config);

/// Arithmetic mean of homogeneous reports (same method and task); the seed
/// list concatenates. Throws DomainError on empty or mixed input.
MetricsReport average_reports(const std::vector<MetricsReport>& reports);

} // namespace mulab
