#include "mulab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mulab/errors.hpp"

namespace mulab {

Tensor log_softmax(const Tensor& logits) {
    Tensor out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto in_row = logits.row(i);
        double maxv = *std::max_element(in_row.begin(), in_row.end());
        double sum = 0.0;
        for (double v : in_row) sum += std::exp(v - maxv);
        const double log_norm = maxv + std::log(sum);
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            out(i, j) = logits(i, j) - log_norm;
        }
    }
    return out;
}

Tensor softmax(const Tensor& logits) {
    Tensor out = log_softmax(logits);
    for (double& v : out.values()) v = std::exp(v);
    return out;
}

CrossEntropyResult cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows()) {
        throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(logits.rows()) + " rows");
    }
    if (logits.rows() == 0) throw DomainError("cross_entropy: empty batch");
    const auto n = logits.rows();
    const auto classes = logits.cols();
    CrossEntropyResult result;
    Tensor lp = log_softmax(logits);
    result.dlogits = Tensor(n, classes);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= classes) {
            throw DomainError("cross_entropy: label " + std::to_string(label) + " outside [0, " +
                              std::to_string(classes) + ")");
        }
        result.value -= lp(i, static_cast<std::size_t>(label));
        for (std::size_t j = 0; j < classes; ++j) {
            double p = std::exp(lp(i, j));
            result.dlogits(i, j) = (p - (static_cast<std::size_t>(label) == j ? 1.0 : 0.0)) / static_cast<double>(n);
        }
    }
    result.value /= static_cast<double>(n);
    return result;
}

std::vector<double> per_sample_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows()) {
        throw ShapeError("per_sample_cross_entropy: label count mismatch");
    }
    Tensor lp = log_softmax(logits);
    std::vector<double> losses(logits.rows());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= logits.cols()) {
            throw DomainError("per_sample_cross_entropy: label " + std::to_string(label) + " out of range");
        }
        losses[i] = -lp(i, static_cast<std::size_t>(label));
    }
    return losses;
}

KlResult kl_divergence(const Tensor& logits_p, const Tensor& logits_q, KlFlow flow) {
    if (!logits_p.same_shape(logits_q)) {
        throw ShapeError("kl_divergence: " + std::to_string(logits_p.rows()) + "x" +
                         std::to_string(logits_p.cols()) + " vs " + std::to_string(logits_q.rows()) +
                         "x" + std::to_string(logits_q.cols()));
    }
    if (logits_p.rows() == 0) throw DomainError("kl_divergence: empty batch");
    const auto n = logits_p.rows();
    const auto m = logits_p.cols();
    KlResult result;
    result.dlogits_p = Tensor(n, m);
    result.dlogits_q = Tensor(n, m);

    Tensor lp = log_softmax(logits_p);
    Tensor lq = log_softmax(logits_q);
    for (std::size_t i = 0; i < n; ++i) {
        double row_kl = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            row_kl += std::exp(lp(i, j)) * (lp(i, j) - lq(i, j));
        }
        result.value += row_kl;
        for (std::size_t j = 0; j < m; ++j) {
            const double p = std::exp(lp(i, j));
            // d/dp_logit: p_j ((ln p_j - ln q_j) - KL_row); d/dq_logit: q_j - p_j
            result.dlogits_p(i, j) = p * ((lp(i, j) - lq(i, j)) - row_kl) / static_cast<double>(n);
            if (flow == KlFlow::Both) {
                result.dlogits_q(i, j) = (std::exp(lq(i, j)) - p) / static_cast<double>(n);
            }
        }
    }
    result.value /= static_cast<double>(n);
    return result;
}

} // namespace mulab
