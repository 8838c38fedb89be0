#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mulab {

/// Purpose tags for deriving independent random streams from one user seed.
/// Every randomized operation draws from its own stream so that adding or
/// removing one consumer never shifts the draws seen by another:
///
///   ModelInit  - weight initialization
///   Blobs      - synthetic dataset generation
///   Split      - forgetting/remaining shuffle
///   TuplePair  - choice of the remaining sample paired with each tuple
///   TupleMask  - the additive mask entries
///   TupleLabel - the replacement label
///   BatchOrder - mini-batch permutation (salted per epoch by the caller)
///   MiaSplit   - calibration/holdout split inside the inference attack
///   TestSample - non-member sampling from the test set
enum class Stream : std::uint64_t {
    ModelInit = 1,
    Blobs = 2,
    Split = 3,
    TuplePair = 4,
    TupleMask = 5,
    TupleLabel = 6,
    BatchOrder = 7,
    MiaSplit = 8,
    TestSample = 9,
};

/// One splitmix64 step; used for seed mixing only.
std::uint64_t splitmix64(std::uint64_t& state);

/// Mixes a salt into a seed, producing a decorrelated derived seed.
std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t salt);

/// Seeded generator with distributions implemented by hand so that the
/// produced values are identical on every platform (the standard pins the
/// mt19937_64 output sequence but not the library distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Stream derived from (seed, purpose, index); see Stream for purposes.
    static Rng stream(std::uint64_t seed, Stream purpose, std::uint64_t index = 0);

    /// Uniform double in [0, 1).
    double uniform();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Unbiased uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Approximate standard normal (Irwin-Hall, 12 uniforms). Chosen over
    /// Box-Muller because it needs no transcendentals, keeping the value
    /// bit-identical across libm implementations.
    double normal();

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// [0, n) as a vector, shuffled with the given generator.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

} // namespace mulab
