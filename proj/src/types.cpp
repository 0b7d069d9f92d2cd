// SPDX-License-Identifier: Apache-2.0
#include "bdft/types.hpp"

#include <algorithm>

namespace bdft {

void validate(const TimeSeries& ts) {
    if (ts.samples.empty())
        throw ValidationError("time series is empty");
    if (!(ts.sample_rate > 0.0) || !std::isfinite(ts.sample_rate))
        throw ValidationError("time series sample rate must be positive");
    for (std::size_t i = 0; i < ts.samples.size(); ++i) {
        if (!std::isfinite(ts.samples[i]))
            throw ValidationError("time series sample " + std::to_string(i) + " is not finite");
    }
}

void require_same_grid(const TimeSeries& a, const TimeSeries& b) {
    if (a.samples.size() != b.samples.size())
        throw ValidationError("series length mismatch: " + std::to_string(a.samples.size()) +
                              " vs " + std::to_string(b.samples.size()));
    const double rel = std::abs(a.sample_rate - b.sample_rate) /
                       std::max(a.sample_rate, b.sample_rate);
    if (!(rel <= 1e-12))
        throw ValidationError("sample rate mismatch");
}

double mean(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size());
}

double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

double peak_abs(const std::vector<double>& x) {
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    return peak;
}

}  // namespace bdft
