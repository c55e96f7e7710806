#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rampart {

// SplitMix64 finalizer; used to turn (seed, tag) pairs into well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of the stream identified by (master_seed, stream_tag). Pure function of both.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_tag) noexcept {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(stream_tag ^ 0x5851f42d4c957f2dULL));
}

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the standard.
/// Distributions are implemented here rather than taken from <random> because the
/// standard library's distribution algorithms are implementation-defined; owning
/// them keeps every generated dataset and minipatch identical across toolchains.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

    __extension__ using u128 = unsigned __int128;

    // Uniform integer in [0, bound). Lemire's multiply-and-reject method, unbiased.
    std::uint64_t uniform_below(std::uint64_t bound) {
        u128 product = static_cast<u128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<u128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Generator whose stream is a pure function of (master_seed, stream_tag).
inline Rng derive_rng(std::uint64_t master_seed, std::uint64_t stream_tag) {
    return Rng(derive_seed(master_seed, stream_tag));
}

}  // namespace rampart
