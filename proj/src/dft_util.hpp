// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "bdft/types.hpp"

namespace bdft::detail {

/// Single-bin DFT, X[k] = sum_m x[m] exp(-j 2 pi k m / N). The angle is
/// reduced with exact integer arithmetic so precision does not degrade on
/// long records.
inline std::complex<double> dft_bin(const std::vector<double>& x, std::size_t bin) {
    const std::size_t n = x.size();
    double re = 0.0, im = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double ang =
            -kTwoPi * static_cast<double>((bin * m) % n) / static_cast<double>(n);
        re += x[m] * std::cos(ang);
        im += x[m] * std::sin(ang);
    }
    return {re, im};
}

/// Same, over the sub-record [offset, offset + len).
inline std::complex<double> dft_bin(const std::vector<double>& x, std::size_t offset,
                                    std::size_t len, std::size_t bin) {
    double re = 0.0, im = 0.0;
    for (std::size_t m = 0; m < len; ++m) {
        const double ang =
            -kTwoPi * static_cast<double>((bin * m) % len) / static_cast<double>(len);
        re += x[offset + m] * std::cos(ang);
        im += x[offset + m] * std::sin(ang);
    }
    return {re, im};
}

}  // namespace bdft::detail
