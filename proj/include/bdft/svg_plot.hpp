// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "bdft/bdft_model.hpp"

namespace bdft {

/// One curve or marker set on a Bode plot.
struct BodeSeries {
    std::string label;
    std::string color = "#000000";
    bool markers = false;  // draw points instead of a line
    std::vector<double> omega;
    std::vector<std::complex<double>> value;
};

/// Renders magnitude (log-log) and phase (semilog) panels as a standalone SVG
/// document. Pure data-to-text emission, no plotting runtime.
std::string bode_svg(const std::vector<BodeSeries>& series, const std::string& title);

}  // namespace bdft
