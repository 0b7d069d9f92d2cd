// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bdft {

/// Deterministic random source used by all synthesis code. Distributions are
/// built by hand on top of the raw mt19937_64 stream so generated datasets do
/// not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Inclusive integer range.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPiLocal * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPiLocal * u2);
    }

private:
    static constexpr double kTwoPiLocal = 6.28318530717958647692528676655900577;
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bdft
