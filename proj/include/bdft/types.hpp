// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdft {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NyquistViolation : Error { using Error::Error; };
struct EmptySpec : Error { using Error::Error; };
struct ZeroSignal : Error { using Error::Error; };
struct NonCommensurate : Error { using Error::Error; };
struct BandEmpty : Error { using Error::Error; };
struct SpectralOverlap : Error { using Error::Error; };
struct SampleRateTooLow : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct InvalidResult : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct ZeroExcitation : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct DegenerateVariable : Error { using Error::Error; };

/// Config, schema, and argument errors. CLI maps these to exit code 2.
struct ValidationError : Error { using Error::Error; };

/// Uniformly sampled scalar signal. Units depend on context: m/s^2 for
/// acceleration perturbations, screen mm for finger positions.
struct TimeSeries {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Hz

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double dt() const { return 1.0 / sample_rate; }
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
    double operator[](std::size_t i) const { return samples[i]; }
};

/// Throws ValidationError unless the series is non-empty, finite, and has a
/// positive sample rate.
void validate(const TimeSeries& ts);

/// Throws ValidationError unless both series share length and sample rate.
void require_same_grid(const TimeSeries& a, const TimeSeries& b);

double mean(const std::vector<double>& x);
/// Population variance about the mean.
double variance(const std::vector<double>& x);
/// Root mean square of the raw samples (mean not removed).
double rms(const std::vector<double>& x);
double peak_abs(const std::vector<double>& x);

inline double mean(const TimeSeries& ts) { return mean(ts.samples); }
inline double variance(const TimeSeries& ts) { return variance(ts.samples); }
inline double rms(const TimeSeries& ts) { return rms(ts.samples); }
inline double peak_abs(const TimeSeries& ts) { return peak_abs(ts.samples); }

}  // namespace bdft
