// Seeded random number generation with reproducible, platform-independent
// sampling primitives. The standard distributions are avoided on purpose:
// their algorithms are implementation-defined, which would break the
// byte-identical-output contract of the experiment harness.

#pragma once

#include "robustrl/definitions.hpp"

#include <cstdint>
#include <random>

namespace robustrl {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    prec_t uniform() { return static_cast<prec_t>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        assert(n > 0);
        return std::min<std::size_t>(static_cast<std::size_t>(uniform() * static_cast<prec_t>(n)),
                                     n - 1);
    }

    /// Standard exponential via inverse CDF.
    prec_t exponential() { return -std::log1p(-uniform()); }

    /// Samples an index from a probability row by inverse CDF walk.
    /// Ties and rounding resolve toward the smallest index with residual mass.
    std::size_t sample_row(const numvec& p) {
        const prec_t u = uniform();
        prec_t acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < p.size(); i++) {
            if (p[i] <= 0.0) continue;
            acc += p[i];
            last = i;
            if (u < acc) return i;
        }
        return last;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace robustrl
