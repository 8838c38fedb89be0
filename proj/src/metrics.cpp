#include "mulab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mulab/errors.hpp"
#include "mulab/losses.hpp"
#include "mulab/rng.hpp"
#include "mulab/train.hpp"

namespace mulab {

std::string task_name(TaskKind task) {
    return task == TaskKind::RandomRemoval ? "random_removal" : "class_removal";
}

double accuracy(const Model& model, const Dataset& dataset) {
    if (dataset.empty()) throw DomainError("accuracy: empty dataset");
    ForwardTrace trace = forward_with_representation(model, dataset.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < trace.logits.cols(); ++j) {
            if (trace.logits(i, j) > trace.logits(i, best)) best = j; // ties keep the lowest index
        }
        if (static_cast<int>(best) == dataset.labels[i]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(dataset.size());
}

namespace {

struct HalfSplit {
    std::vector<double> calibration;
    std::vector<double> holdout;
};

HalfSplit half_split(const std::vector<double>& losses, Rng& rng) {
    std::vector<std::size_t> order = shuffled_indices(losses.size(), rng);
    HalfSplit out;
    const std::size_t half = losses.size() / 2;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        (i < half ? out.calibration : out.holdout).push_back(losses[order[i]]);
    }
    return out;
}

// balanced accuracy of "member = loss <= threshold"
double balanced_accuracy(const std::vector<double>& members, const std::vector<double>& nonmembers,
                         double threshold) {
    std::size_t tp = 0;
    for (double v : members) {
        if (v <= threshold) ++tp;
    }
    std::size_t tn = 0;
    for (double v : nonmembers) {
        if (v > threshold) ++tn;
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(members.size());
    const double tnr = static_cast<double>(tn) / static_cast<double>(nonmembers.size());
    return 0.5 * (tpr + tnr);
}

} // namespace

double mia_from_losses(const std::vector<double>& member_losses, const std::vector<double>& nonmember_losses,
                       std::uint64_t seed) {
    if (member_losses.size() < 2 || nonmember_losses.size() < 2) {
        throw DomainError("mia: both loss sets need at least 2 samples");
    }
    Rng rng = Rng::stream(seed, Stream::MiaSplit);
    HalfSplit members = half_split(member_losses, rng);
    HalfSplit nonmembers = half_split(nonmember_losses, rng);

    // candidate thresholds: every calibration loss plus a reject-all sentinel
    std::vector<double> candidates;
    candidates.reserve(members.calibration.size() + nonmembers.calibration.size() + 1);
    candidates.insert(candidates.end(), members.calibration.begin(), members.calibration.end());
    candidates.insert(candidates.end(), nonmembers.calibration.begin(), nonmembers.calibration.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.insert(candidates.begin(), candidates.empty() ? -1.0 : candidates.front() - 1.0);

    double best_threshold = candidates.front();
    double best_score = -1.0;
    for (double t : candidates) {
        const double score = balanced_accuracy(members.calibration, nonmembers.calibration, t);
        if (score > best_score) { // strict: ties keep the smallest threshold
            best_score = score;
            best_threshold = t;
        }
    }
    return 100.0 * balanced_accuracy(members.holdout, nonmembers.holdout, best_threshold);
}

double mia_success_rate(const Model& model, const Dataset& members, const Dataset& nonmembers,
                        std::uint64_t seed) {
    if (members.size() < 2 || nonmembers.size() < 2) {
        throw DomainError("mia_success_rate: both sets need at least 2 samples");
    }
    ForwardTrace member_trace = forward_with_representation(model, members.features);
    ForwardTrace nonmember_trace = forward_with_representation(model, nonmembers.features);
    return mia_from_losses(per_sample_cross_entropy(member_trace.logits, members.labels),
                           per_sample_cross_entropy(nonmember_trace.logits, nonmembers.labels), seed);
}

MetricsReport evaluate(const std::string& method, const Model& model, const TaskSplits& splits,
                       std::uint64_t seed, double wall_time_seconds) {
    MetricsReport report;
    report.method = method;
    report.task = splits.task;
    report.seeds = {seed};
    report.wall_time_seconds = wall_time_seconds;

    if (splits.task == TaskKind::RandomRemoval) {
        report.r_train = accuracy(model, splits.remaining);
        report.f_train = accuracy(model, splits.forgetting);
        report.test = accuracy(model, splits.test);
    } else {
        if (splits.forgotten_classes.empty()) {
            throw DomainError("evaluate: class_removal task without forgotten classes");
        }
        report.r_test = accuracy(model, filter_by_class(splits.test, splits.forgotten_classes, false));
        report.f_test = accuracy(model, filter_by_class(splits.test, splits.forgotten_classes, true));
    }

    // members: forgetting training data; non-members: equal-size test sample
    const std::size_t k = std::min(splits.forgetting.size(), splits.test.size());
    Rng rng = Rng::stream(seed, Stream::TestSample);
    std::vector<std::size_t> test_order = shuffled_indices(splits.test.size(), rng);
    test_order.resize(k);
    Dataset nonmembers = take_rows(splits.test, test_order);
    Dataset members = splits.forgetting;
    if (members.size() > k) {
        std::vector<std::size_t> member_order = shuffled_indices(members.size(), rng);
        member_order.resize(k);
        members = take_rows(members, member_order);
    }
    report.mia = mia_success_rate(model, members, nonmembers, seed);
    return report;
}

namespace {

double relearn_gap(const Model& model, const TaskSplits& splits) {
    if (splits.task == TaskKind::RandomRemoval) {
        return accuracy(model, splits.remaining) - accuracy(model, splits.forgetting);
    }
    return accuracy(model, filter_by_class(splits.test, splits.forgotten_classes, false)) -
           accuracy(model, filter_by_class(splits.test, splits.forgotten_classes, true));
}

} // namespace

RelearnCurve relearn_curve(const Model& unlearned, const TaskSplits& splits, const RelearnConfig& config) {
    if (config.epochs < 1) throw ConfigError("relearn_curve: epochs must be at least 1");
    if (config.batch_size < 1) throw ConfigError("relearn_curve: batch_size must be at least 1");
    if (splits.remaining.empty()) throw DomainError("relearn_curve: remaining data is empty");

    RelearnCurve curve;
    Model model = unlearned;
    curve.gaps.push_back(relearn_gap(model, splits));
    OptimizerState opt(model, config.learning_rate);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        run_ce_epoch(model, splits.remaining, opt, config.seed, epoch, config.batch_size);
        curve.gaps.push_back(relearn_gap(model, splits));
    }
    return curve;
}

MetricsReport average_reports(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw DomainError("average_reports: no reports");
    MetricsReport mean = reports.front();
    if (reports.size() == 1) return mean;

    auto same_presence = [](const std::optional<double>& a, const std::optional<double>& b) {
        return a.has_value() == b.has_value();
    };
    for (std::size_t i = 1; i < reports.size(); ++i) {
        const MetricsReport& r = reports[i];
        if (r.method != mean.method || r.task != mean.task || !same_presence(r.r_train, mean.r_train) ||
            !same_presence(r.f_train, mean.f_train) || !same_presence(r.test, mean.test) ||
            !same_presence(r.r_test, mean.r_test) || !same_presence(r.f_test, mean.f_test)) {
            throw DomainError("average_reports: heterogeneous reports");
        }
    }

    auto mean_of = [&](auto field) {
        double sum = 0.0;
        for (const auto& r : reports) sum += field(r);
        return sum / static_cast<double>(reports.size());
    };
    auto mean_opt = [&](auto field) -> std::optional<double> {
        if (!field(mean).has_value()) return std::nullopt;
        double sum = 0.0;
        for (const auto& r : reports) sum += *field(r);
        return sum / static_cast<double>(reports.size());
    };

    mean.seeds.clear();
    for (const auto& r : reports) {
        mean.seeds.insert(mean.seeds.end(), r.seeds.begin(), r.seeds.end());
    }
    mean.r_train = mean_opt([](const MetricsReport& r) { return r.r_train; });
    mean.f_train = mean_opt([](const MetricsReport& r) { return r.f_train; });
    mean.test = mean_opt([](const MetricsReport& r) { return r.test; });
    mean.r_test = mean_opt([](const MetricsReport& r) { return r.r_test; });
    mean.f_test = mean_opt([](const MetricsReport& r) { return r.f_test; });
    mean.mia = mean_of([](const MetricsReport& r) { return r.mia; });
    mean.wall_time_seconds = mean_of([](const MetricsReport& r) { return r.wall_time_seconds; });
    return mean;
}

} // namespace mulab
