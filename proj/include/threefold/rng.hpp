#pragma once

#include <cstdint>
#include <random>

namespace threefold {

/// 64-bit linear congruential generator, x <- a x + c (mod 2^64) with
/// Knuth's MMIX constants. Uniform doubles use the top 53 bits, so a seed
/// reproduces the same stream on every platform.
class LinearRng {
public:
    using Engine = std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL,
                                                   1442695040888963407ULL, 0ULL>;

    explicit LinearRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    int integer(int lo, int hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>((next() >> 11) % span);
    }

private:
    Engine engine_;
};

} // namespace threefold
