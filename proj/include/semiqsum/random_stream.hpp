#pragma once

// Seeded, platform-stable random source. Every consumer of randomness in the
// library takes a RandomStream explicitly; there is no global generator.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not, so the sampling helpers below are written out by hand.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace semiqsum {

/// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Seed of the child stream for (seed, label).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept {
    return mix64(seed ^ mix64(label + 0x5851f42d4c957f2dull));
}

class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    /// Child stream for (seed, label). Distinct labels give unrelated streams.
    static RandomStream derive(std::uint64_t seed, std::uint64_t label) {
        return RandomStream(derive_seed(seed, label));
    }

    std::uint64_t seed() const noexcept { return seed_; }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

    int bit() { return static_cast<int>(engine_() >> 63); }

    /// Uniform double in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("RandomStream::below: empty range");
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// k distinct indices from [0, n), uniformly, returned in ascending order.
    std::vector<std::size_t> sample_without_replacement(std::size_t k, std::size_t n) {
        if (k > n) throw std::invalid_argument("RandomStream: sample larger than population");
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace semiqsum
