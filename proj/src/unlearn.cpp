#include "mulab/unlearn.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "mulab/errors.hpp"
#include "mulab/losses.hpp"
#include "mulab/rng.hpp"
#include "mulab/train.hpp"

namespace mulab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void ensure_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw DivergenceError(std::string(what) + " became non-finite");
    }
}

} // namespace

void check_unlearn_config(const UnlearnConfig& config) {
    if (config.epochs < 1) throw ConfigError("unlearn: epochs must be at least 1");
    if (config.batch_size < 1) throw ConfigError("unlearn: batch_size must be at least 1");
    if (!(config.learning_rate >= 0.0)) throw ConfigError("unlearn: learning rate must be non-negative");
}

ObjectiveResult camu_kl_objective(const Model& unlearning, const Model& original, const TupleBatch& batch,
                                  const UnlearnConfig& config, ForwardCounts* counts) {
    ObjectiveResult result;
    result.gradients = GradientSet::zeros_like(unlearning);

    if (config.use_counterfactual) {
        ForwardTrace trace_f = forward_with_representation(unlearning, batch.forgetting_x);
        ForwardTrace trace_cf = forward_with_representation(unlearning, batch.counterfactual_x);
        if (counts) {
            counts->forgetting += trace_f.batch_size;
            counts->counterfactual += trace_cf.batch_size;
        }
        KlResult kl = kl_divergence(trace_f.representation, trace_cf.representation, KlFlow::Both);
        result.value += kl.value;
        result.gradients.add(backward_from_representation(unlearning, trace_f, kl.dlogits_p));
        result.gradients.add(backward_from_representation(unlearning, trace_cf, kl.dlogits_q));
    }
    if (config.use_repr_alignment) {
        ForwardTrace trace_r = forward_with_representation(unlearning, batch.remaining_x);
        ForwardTrace trace_target = forward_with_representation(original, batch.remaining_x);
        if (counts) counts->remaining += trace_r.batch_size;
        KlResult kl = kl_divergence(trace_r.representation, trace_target.representation, KlFlow::FreezeQ);
        result.value += kl.value;
        result.gradients.add(backward_from_representation(unlearning, trace_r, kl.dlogits_p));
    }
    return result;
}

ObjectiveResult camu_ce_objective(const Model& unlearning, const TupleBatch& batch,
                                  const UnlearnConfig& config, ForwardCounts* counts) {
    ObjectiveResult result;
    result.gradients = GradientSet::zeros_like(unlearning);

    if (config.use_counterfactual) {
        ForwardTrace trace_f = forward_with_representation(unlearning, batch.forgetting_x);
        if (counts) counts->forgetting += trace_f.batch_size;
        CrossEntropyResult ce = cross_entropy(trace_f.logits, batch.counterfactual_y);
        result.value += ce.value;
        result.gradients.add(backward_from_logits(unlearning, trace_f, ce.dlogits));
    }
    ForwardTrace trace_r = forward_with_representation(unlearning, batch.remaining_x);
    if (counts) counts->remaining += trace_r.batch_size;
    CrossEntropyResult ce = cross_entropy(trace_r.logits, batch.remaining_y);
    result.value += ce.value;
    result.gradients.add(backward_from_logits(unlearning, trace_r, ce.dlogits));
    return result;
}

UnlearnResult camu(const Model& original, const JointDataset& joint, const UnlearnConfig& config) {
    check_unlearn_config(config);
    if (joint.size() == 0) throw DomainError("camu: joint dataset is empty");

    const auto start = Clock::now();
    UnlearnResult result;
    result.model = original;
    OptimizerState opt(result.model, config.learning_rate);
    const bool kl_step_active = config.use_counterfactual || config.use_repr_alignment;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double kl_sum = 0.0;
        double ce_sum = 0.0;
        std::size_t batch_count = 0;
        for (const auto& indices : epoch_batches(joint.size(), config.batch_size, config.seed, epoch)) {
            TupleBatch batch = gather_tuples(joint, indices);

            if (kl_step_active) {
                ObjectiveResult kl = camu_kl_objective(result.model, original, batch, config, &result.forwards);
                ensure_finite(kl.value, "camu KL objective");
                opt.accumulate(kl.gradients);
                opt.step(result.model);
                kl_sum += kl.value;
            }

            ObjectiveResult ce = camu_ce_objective(result.model, batch, config, &result.forwards);
            ensure_finite(ce.value, "camu CE objective");
            opt.accumulate(ce.gradients);
            opt.step(result.model);
            ce_sum += ce.value;

            ++batch_count;
        }
        const double denom = batch_count > 0 ? static_cast<double>(batch_count) : 1.0;
        result.loss_trace.push_back({kl_sum / denom, ce_sum / denom});
    }
    result.wall_time_seconds = seconds_since(start);
    return result;
}

UnlearnResult finetune(const Model& original, const Dataset& remaining, const UnlearnConfig& config) {
    check_unlearn_config(config);
    if (remaining.empty()) throw DomainError("finetune: remaining data is empty");

    const auto start = Clock::now();
    UnlearnResult result;
    result.model = original;
    OptimizerState opt(result.model, config.learning_rate);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double ce = run_ce_epoch(result.model, remaining, opt, config.seed, epoch, config.batch_size);
        result.forwards.remaining += remaining.size();
        result.loss_trace.push_back({0.0, ce});
    }
    result.wall_time_seconds = seconds_since(start);
    return result;
}

UnlearnResult neg_grad(const Model& original, const Dataset& forgetting, const Dataset& remaining,
                       const UnlearnConfig& config, double negative_weight) {
    check_unlearn_config(config);
    if (forgetting.empty()) throw DomainError("neg_grad: forgetting data is empty");
    if (remaining.empty()) throw DomainError("neg_grad: remaining data is empty");

    const auto start = Clock::now();
    UnlearnResult result;
    result.model = original;
    OptimizerState opt(result.model, config.learning_rate);

    auto gather = [](const Dataset& dataset, const std::vector<std::size_t>& indices) {
        Tensor x(indices.size(), dataset.dim());
        std::vector<int> y(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            for (std::size_t j = 0; j < dataset.dim(); ++j) x(i, j) = dataset.features(indices[i], j);
            y[i] = dataset.labels[indices[i]];
        }
        return std::pair{std::move(x), std::move(y)};
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto r_batches = epoch_batches(remaining.size(), config.batch_size, config.seed, epoch);
        const auto f_batches =
            epoch_batches(forgetting.size(), config.batch_size, combine_seed(config.seed, 0x4eULL), epoch);
        double ce_sum = 0.0;
        for (std::size_t b = 0; b < r_batches.size(); ++b) {
            auto [rx, ry] = gather(remaining, r_batches[b]);
            ForwardTrace r_trace = forward_with_representation(result.model, rx);
            CrossEntropyResult r_ce = cross_entropy(r_trace.logits, ry);
            result.forwards.remaining += r_trace.batch_size;
            opt.accumulate(backward_from_logits(result.model, r_trace, r_ce.dlogits));

            auto [fx, fy] = gather(forgetting, f_batches[b % f_batches.size()]);
            ForwardTrace f_trace = forward_with_representation(result.model, fx);
            CrossEntropyResult f_ce = cross_entropy(f_trace.logits, fy);
            result.forwards.forgetting += f_trace.batch_size;
            GradientSet neg = backward_from_logits(result.model, f_trace, f_ce.dlogits);
            neg.scale(-negative_weight);
            opt.accumulate(neg);

            const double loss = r_ce.value - negative_weight * f_ce.value;
            ensure_finite(loss, "neg_grad objective");
            opt.step(result.model);
            ce_sum += loss;
        }
        const double denom = r_batches.empty() ? 1.0 : static_cast<double>(r_batches.size());
        result.loss_trace.push_back({0.0, ce_sum / denom});
    }
    result.wall_time_seconds = seconds_since(start);
    return result;
}

} // namespace mulab
