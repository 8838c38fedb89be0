#include "mulab/rng.hpp"

#include <stdexcept>

namespace mulab {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state ^= salt * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(state);
    return a ^ (b + 0x632be59bd9b4e019ULL);
}

Rng Rng::stream(std::uint64_t seed, Stream purpose, std::uint64_t index) {
    std::uint64_t derived = combine_seed(seed, static_cast<std::uint64_t>(purpose));
    derived = combine_seed(derived, index);
    return Rng(derived);
}

double Rng::uniform() {
    // 53 mantissa bits -> exact dyadic rational in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    // reject draws in the top 2^64 mod n values to keep the result unbiased
    std::uint64_t rem = (0ULL - n) % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (rem != 0 && x >= 0ULL - rem);
    return x % n;
}

double Rng::normal() {
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) sum += uniform();
    return sum - 6.0;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng.shuffle(idx);
    return idx;
}

} // namespace mulab
