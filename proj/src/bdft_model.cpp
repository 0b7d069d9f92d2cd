// SPDX-License-Identifier: Apache-2.0
#include "bdft/bdft_model.hpp"

#include <algorithm>
#include <cmath>

namespace bdft {

void validate(const BdftParams& p) {
    if (!std::isfinite(p.gain))
        throw ValidationError("model gain must be finite");
    if (!(p.natural_frequency > 0.0) || !std::isfinite(p.natural_frequency))
        throw ValidationError("natural frequency must be strictly positive");
    if (!(p.damping_ratio > 0.0) || !std::isfinite(p.damping_ratio))
        throw ValidationError("damping ratio must be strictly positive");
}

void validate(const FrequencyResponse& frf) {
    for (std::size_t i = 0; i < frf.points.size(); ++i) {
        const auto& pt = frf.points[i];
        if (!std::isfinite(pt.omega) || !std::isfinite(pt.value.real()) ||
            !std::isfinite(pt.value.imag()) || !std::isfinite(pt.weight))
            throw ValidationError("frequency response point " + std::to_string(i) +
                                  " is not finite");
        if (pt.weight < 0.0 || pt.weight > 1.0)
            throw ValidationError("coherence weight must lie in [0, 1]");
        if (i > 0 && !(pt.omega > frf.points[i - 1].omega))
            throw ValidationError("frequency response frequencies must be strictly increasing");
    }
}

std::complex<double> frf_value(const BdftParams& p, double omega) {
    const std::complex<double> jw(0.0, omega);
    const double wn2 = p.natural_frequency * p.natural_frequency;
    return p.gain * wn2 /
           (jw * jw + 2.0 * p.damping_ratio * p.natural_frequency * jw + wn2);
}

FrequencyResponse evaluate_frf(const BdftParams& p, const std::vector<double>& omegas) {
    validate(p);
    FrequencyResponse out;
    out.points.reserve(omegas.size());
    for (double w : omegas) {
        if (w < 0.0) throw ValidationError("frequency grid must be non-negative");
        out.points.push_back({w, frf_value(p, w), 1.0});
    }
    validate(out);
    return out;
}

BiquadCoeffs discretize(const BdftParams& p, double sample_rate, bool prewarp) {
    validate(p);
    if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
    if (p.natural_frequency >= kPi * sample_rate)
        throw SampleRateTooLow("natural frequency " + std::to_string(p.natural_frequency) +
                               " rad/s needs a sample rate above " +
                               std::to_string(p.natural_frequency / kPi) + " Hz");

    // H(s) = G wn^2 / (s^2 + 2 zeta wn s + wn^2), s -> K (1 - z^-1)/(1 + z^-1)
    const double wn = p.natural_frequency;
    const double k = prewarp ? wn / std::tan(wn / (2.0 * sample_rate)) : 2.0 * sample_rate;
    const double wn2 = wn * wn;
    const double a0 = k * k + 2.0 * p.damping_ratio * wn * k + wn2;

    BiquadCoeffs c;
    c.b0 = p.gain * wn2 / a0;
    c.b1 = 2.0 * c.b0;
    c.b2 = c.b0;
    c.a1 = (2.0 * wn2 - 2.0 * k * k) / a0;
    c.a2 = (k * k - 2.0 * p.damping_ratio * wn * k + wn2) / a0;
    return c;
}

TimeSeries simulate_response(const BdftParams& p, const TimeSeries& input, bool prewarp) {
    validate(input);
    Biquad filter(discretize(p, input.sample_rate, prewarp));
    TimeSeries out;
    out.sample_rate = input.sample_rate;
    out.samples.resize(input.samples.size());
    for (std::size_t i = 0; i < input.samples.size(); ++i)
        out.samples[i] = filter.step(input.samples[i]);
    return out;
}

double time_constant(const BdftParams& p) {
    validate(p);
    return 1.0 / (p.damping_ratio * p.natural_frequency);
}

double settling_time(const BdftParams& p, double n_time_constants) {
    return n_time_constants * time_constant(p);
}

TimeSeries discard_transient(const TimeSeries& ts, const BdftParams& p,
                             double n_time_constants) {
    validate(ts);
    const auto skip = static_cast<std::size_t>(
        std::ceil(settling_time(p, n_time_constants) * ts.sample_rate));
    if (skip >= ts.samples.size())
        throw ValidationError("record shorter than the transient window");
    TimeSeries out;
    out.sample_rate = ts.sample_rate;
    out.samples.assign(ts.samples.begin() + static_cast<std::ptrdiff_t>(skip),
                       ts.samples.end());
    return out;
}

namespace {

BdftParams evaluate_affine(const LpvSchedule& s, double v) {
    const double d = v - s.reference_value;
    return {s.base.gain + s.sensitivities.gain * d,
            s.base.natural_frequency + s.sensitivities.natural_frequency * d,
            s.base.damping_ratio + s.sensitivities.damping_ratio * d};
}

}  // namespace

LpvSchedule make_lpv_schedule(const BdftParams& base, const LpvSensitivities& sens,
                              std::string variable_name, double reference_value,
                              double range_min, double range_max) {
    validate(base);
    if (!(range_min <= range_max))
        throw ValidationError("schedule range is empty");
    if (reference_value < range_min || reference_value > range_max)
        throw ValidationError("schedule reference point lies outside its range");

    LpvSchedule s{base, sens, std::move(variable_name), reference_value, range_min, range_max};
    // Affine in v: positivity over the range follows from the endpoints.
    for (double v : {range_min, range_max}) {
        const BdftParams at = evaluate_affine(s, v);
        if (!(at.natural_frequency > 0.0) || !(at.damping_ratio > 0.0) ||
            !std::isfinite(at.gain))
            throw InvalidResult("schedule leaves the parameter domain at variable value " +
                                std::to_string(v));
    }
    return s;
}

BdftParams evaluate_schedule(const LpvSchedule& schedule, double variable_value) {
    if (variable_value < schedule.range_min || variable_value > schedule.range_max)
        throw OutOfRange("scheduling variable " + std::to_string(variable_value) +
                         " outside [" + std::to_string(schedule.range_min) + ", " +
                         std::to_string(schedule.range_max) + "]");
    const BdftParams p = evaluate_affine(schedule, variable_value);
    if (!(p.natural_frequency > 0.0) || !(p.damping_ratio > 0.0) || !std::isfinite(p.gain))
        throw InvalidResult("schedule produced invalid parameters inside its range");
    return p;
}

}  // namespace bdft
