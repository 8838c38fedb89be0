#pragma once

#include <vector>

#include "mulab/tensor.hpp"

namespace mulab {

/// Row-wise softmax with max subtraction; rows sum to 1.
Tensor softmax(const Tensor& logits);

/// Row-wise log-softmax with max subtraction.
Tensor log_softmax(const Tensor& logits);

struct CrossEntropyResult {
    double value = 0.0; ///< mean over the batch of -log p[label]
    Tensor dlogits;     ///< (softmax - one_hot) / batch
};

/// Mean cross-entropy of logits (n x C) against integer labels.
/// Throws DomainError for labels outside [0, C).
CrossEntropyResult cross_entropy(const Tensor& logits, const std::vector<int>& labels);

/// Per-sample cross-entropy losses, no reduction. Used by the inference attack.
std::vector<double> per_sample_cross_entropy(const Tensor& logits, const std::vector<int>& labels);

/// Whether kl_divergence propagates a gradient into its second argument.
/// FreezeQ treats the q side as a fixed target.
enum class KlFlow { Both, FreezeQ };

struct KlResult {
    double value = 0.0; ///< mean over rows of sum_i p_i (ln p_i - ln q_i)
    Tensor dlogits_p;
    Tensor dlogits_q;   ///< zero-shaped gradient when flow == FreezeQ
};

/// KL(softmax(logits_p) || softmax(logits_q)), averaged over rows.
/// Both inputs are unnormalized scores; softmax is applied internally.
KlResult kl_divergence(const Tensor& logits_p, const Tensor& logits_q, KlFlow flow = KlFlow::Both);

} // namespace mulab
