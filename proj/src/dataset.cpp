#include "mulab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "mulab/errors.hpp"
#include "mulab/rng.hpp"

namespace mulab {

void validate_dataset(const Dataset& dataset) {
    if (dataset.labels.size() != dataset.features.rows()) {
        throw ShapeError("dataset: " + std::to_string(dataset.labels.size()) + " labels for " +
                         std::to_string(dataset.features.rows()) + " rows");
    }
    for (int label : dataset.labels) {
        if (label < 0 || label >= dataset.num_classes) {
            throw DomainError("dataset: label " + std::to_string(label) + " outside [0, " +
                              std::to_string(dataset.num_classes) + ")");
        }
    }
    for (double v : dataset.features.values()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("dataset: feature value " + std::to_string(v) + " outside [0, 1]");
        }
    }
}

Dataset take_rows(const Dataset& dataset, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.num_classes = dataset.num_classes;
    out.features = Tensor(indices.size(), dataset.dim());
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        for (std::size_t j = 0; j < dataset.dim(); ++j) {
            out.features(i, j) = dataset.features(src, j);
        }
        out.labels.push_back(dataset.labels[src]);
    }
    return out;
}

Dataset filter_by_class(const Dataset& dataset, const std::vector<int>& class_ids, bool keep) {
    std::unordered_set<int> wanted(class_ids.begin(), class_ids.end());
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (wanted.contains(dataset.labels[i]) == keep) indices.push_back(i);
    }
    return take_rows(dataset, indices);
}

SplitResult split(const Dataset& dataset, const SplitSpec& spec) {
    SplitResult result;
    if (spec.mode == SplitMode::RandomFraction) {
        if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
            throw DomainError("split: fraction " + std::to_string(spec.fraction) + " outside (0, 1)");
        }
        Rng rng = Rng::stream(spec.seed, Stream::Split);
        std::vector<std::size_t> order = shuffled_indices(dataset.size(), rng);
        const auto f_count = static_cast<std::size_t>(
            std::llround(spec.fraction * static_cast<double>(dataset.size())));
        result.forgetting_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(f_count));
        result.remaining_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(f_count), order.end());
    } else {
        if (spec.class_ids.empty()) {
            throw DomainError("split: class_removal needs at least one class id");
        }
        std::unordered_set<int> wanted(spec.class_ids.begin(), spec.class_ids.end());
        std::unordered_set<int> present(dataset.labels.begin(), dataset.labels.end());
        for (int c : spec.class_ids) {
            if (!present.contains(c)) {
                throw DomainError("split: class " + std::to_string(c) + " absent from dataset");
            }
        }
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            if (wanted.contains(dataset.labels[i])) {
                result.forgetting_indices.push_back(i);
            } else {
                result.remaining_indices.push_back(i);
            }
        }
    }
    result.forgetting = take_rows(dataset, result.forgetting_indices);
    result.remaining = take_rows(dataset, result.remaining_indices);
    return result;
}

Dataset synth_blobs(int num_classes, int per_class, int dim, double spread, std::uint64_t seed) {
    if (num_classes <= 0 || per_class <= 0 || dim <= 0) {
        throw DomainError("synth_blobs: counts must be positive");
    }
    if (spread < 0.0) {
        throw DomainError("synth_blobs: spread must be non-negative");
    }
    const std::size_t n = static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(per_class);
    const auto d = static_cast<std::size_t>(dim);

    Rng rng = Rng::stream(seed, Stream::Blobs);
    // cluster centers drawn uniformly from the unit cube; distinct with
    // probability one, and pinned by the seed either way
    std::vector<std::vector<double>> means(static_cast<std::size_t>(num_classes), std::vector<double>(d, 0.0));
    for (auto& mean : means) {
        for (double& v : mean) v = rng.uniform();
    }

    Dataset out;
    out.num_classes = num_classes;
    out.features = Tensor(n, d);
    out.labels.resize(n);
    std::size_t row = 0;
    for (int k = 0; k < num_classes; ++k) {
        for (int s = 0; s < per_class; ++s, ++row) {
            out.labels[row] = k;
            for (std::size_t j = 0; j < d; ++j) {
                out.features(row, j) = means[static_cast<std::size_t>(k)][j] + spread * rng.normal();
            }
        }
    }

    // min-max normalize each column into [0, 1]
    for (std::size_t j = 0; j < d; ++j) {
        double lo = out.features(0, j), hi = out.features(0, j);
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, out.features(i, j));
            hi = std::max(hi, out.features(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            out.features(i, j) = range > 0.0 ? (out.features(i, j) - lo) / range : 0.0;
        }
    }
    return out;
}

TrainTestSplit holdout_last_per_class(const Dataset& dataset, int test_per_class) {
    if (test_per_class < 0) throw DomainError("holdout_last_per_class: negative test count");
    std::vector<std::size_t> counts(static_cast<std::size_t>(dataset.num_classes), 0);
    for (int label : dataset.labels) ++counts[static_cast<std::size_t>(label)];
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < static_cast<std::size_t>(test_per_class)) {
            throw DomainError("holdout_last_per_class: class " + std::to_string(c) + " has only " +
                              std::to_string(counts[c]) + " rows");
        }
    }
    std::vector<std::size_t> seen(static_cast<std::size_t>(dataset.num_classes), 0);
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto c = static_cast<std::size_t>(dataset.labels[i]);
        const bool goes_to_test = seen[c] >= counts[c] - static_cast<std::size_t>(test_per_class);
        (goes_to_test ? test_idx : train_idx).push_back(i);
        ++seen[c];
    }
    return {take_rows(dataset, train_idx), take_rows(dataset, test_idx)};
}

std::vector<std::vector<std::size_t>> batches(std::size_t count, std::size_t batch_size, std::uint64_t seed) {
    if (batch_size == 0) {
        throw DomainError("batches: batch_size must be at least 1");
    }
    Rng rng = Rng::stream(seed, Stream::BatchOrder);
    std::vector<std::size_t> order = shuffled_indices(count, rng);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < count; start += batch_size) {
        const std::size_t end = std::min(count, start + batch_size);
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

void save_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("save_csv: cannot open " + path);
    for (std::size_t j = 0; j < dataset.dim(); ++j) {
        out << 'f' << j << ',';
    }
    out << "label\n";
    char buf[64];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t j = 0; j < dataset.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", dataset.features(i, j));
            out << buf << ',';
        }
        out << dataset.labels[i] << '\n';
    }
}

} // namespace mulab
