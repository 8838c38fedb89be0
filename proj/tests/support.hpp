#pragma once

// Shared test helpers: parameter flattening and a central finite-difference
// gradient oracle, kept independent of the backprop implementation it checks.

#include <cmath>
#include <functional>
#include <vector>

#include "mulab/model.hpp"
#include "mulab/rng.hpp"
#include "mulab/tensor.hpp"

namespace testsupport {

inline std::vector<double> flatten_params(const mulab::Model& model) {
    std::vector<double> flat;
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
        const auto& layer = model.layer(i);
        flat.insert(flat.end(), layer.weight.values().begin(), layer.weight.values().end());
        flat.insert(flat.end(), layer.bias.values().begin(), layer.bias.values().end());
    }
    return flat;
}

inline void set_params(mulab::Model& model, const std::vector<double>& flat) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
        auto& layer = model.layer(i);
        for (double& v : layer.weight.values()) v = flat[pos++];
        for (double& v : layer.bias.values()) v = flat[pos++];
    }
}

inline std::vector<double> flatten_grads(const mulab::GradientSet& grads) {
    std::vector<double> flat;
    for (std::size_t i = 0; i < grads.d_weight.size(); ++i) {
        flat.insert(flat.end(), grads.d_weight[i].values().begin(), grads.d_weight[i].values().end());
        flat.insert(flat.end(), grads.d_bias[i].values().begin(), grads.d_bias[i].values().end());
    }
    return flat;
}

/// Central finite differences of `loss` with respect to every model
/// parameter, h = 1e-5.
inline std::vector<double> finite_difference_gradient(mulab::Model model,
                                                      const std::function<double(const mulab::Model&)>& loss,
                                                      double h = 1e-5) {
    std::vector<double> params = flatten_params(model);
    std::vector<double> grad(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = params[k];
        params[k] = saved + h;
        set_params(model, params);
        const double up = loss(model);
        params[k] = saved - h;
        set_params(model, params);
        const double down = loss(model);
        params[k] = saved;
        grad[k] = (up - down) / (2.0 * h);
    }
    set_params(model, params);
    return grad;
}

/// max_k |a_k - b_k| / max(|a_k|, |b_k|, floor)
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                                 double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double denom = std::max({std::fabs(a[k]), std::fabs(b[k]), floor});
        worst = std::max(worst, std::fabs(a[k] - b[k]) / denom);
    }
    return worst;
}

inline mulab::Tensor random_tensor(std::size_t rows, std::size_t cols, mulab::Rng& rng, double scale = 1.0) {
    mulab::Tensor out(rows, cols);
    for (double& v : out.values()) v = scale * (rng.uniform() * 2.0 - 1.0);
    return out;
}

inline std::vector<int> random_labels(std::size_t n, int classes, mulab::Rng& rng) {
    std::vector<int> labels(n);
    for (auto& label : labels) label = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
    return labels;
}

inline bool models_bitwise_equal(const mulab::Model& a, const mulab::Model& b) {
    if (a.layer_count() != b.layer_count()) return false;
    for (std::size_t i = 0; i < a.layer_count(); ++i) {
        if (!(a.layer(i).weight == b.layer(i).weight) || !(a.layer(i).bias == b.layer(i).bias)) return false;
    }
    return true;
}

} // namespace testsupport
