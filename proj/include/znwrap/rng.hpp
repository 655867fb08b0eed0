#pragma once

#include <cstdint>
#include <random>

namespace znwrap {

/// mt19937_64 plus hand-rolled uniform helpers.  The raw engine output is
/// specified bit-for-bit by the standard; the std distributions are not, so
/// every draw used in an experiment goes through these helpers to keep runs
/// reproducible across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound >= 1.  Unbiased (rejection).
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = gen_();
            if (r >= threshold) return r % bound;
        }
    }

    bool next_bool() { return (gen_() >> 63) != 0; }

private:
    std::mt19937_64 gen_;
};

}  // namespace znwrap
