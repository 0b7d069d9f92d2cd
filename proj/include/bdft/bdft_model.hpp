// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bdft/biquad.hpp"
#include "bdft/types.hpp"

namespace bdft {

/// Parameters of the second-order biodynamic feedthrough model
///
///   H(s) = gain * wn^2 / (s^2 + 2*zeta*wn*s + wn^2)
///
/// mapping vehicle acceleration (m/s^2) to involuntary finger displacement
/// (mm). The gain may be negative: feedthrough can invert depending on
/// posture and axis.
struct BdftParams {
    double gain = 0.0;               // mm per m/s^2
    double natural_frequency = 0.0;  // rad/s
    double damping_ratio = 0.0;      // dimensionless
};

/// Throws ValidationError unless natural_frequency > 0, damping_ratio > 0,
/// and gain is finite.
void validate(const BdftParams& p);

/// Complex response estimate at one frequency.
struct FrfPoint {
    double omega = 0.0;                      // rad/s
    std::complex<double> value{0.0, 0.0};
    double weight = 1.0;                     // coherence weight in [0, 1]
};

/// Complex-valued response at a discrete set of frequencies, ordered by
/// strictly increasing omega.
struct FrequencyResponse {
    std::vector<FrfPoint> points;
};

void validate(const FrequencyResponse& frf);

/// H(j*omega) for a single frequency (negative omega allowed; the response
/// of a real system satisfies H(-jw) = conj(H(jw))).
std::complex<double> frf_value(const BdftParams& p, double omega);

/// Evaluates the model on a strictly increasing grid of non-negative
/// frequencies. All weights are 1.
FrequencyResponse evaluate_frf(const BdftParams& p, const std::vector<double>& omegas);

/// Bilinear-transform discretization of the model at the given rate. With
/// prewarp the response is exact at the natural frequency instead of at DC's
/// neighborhood. Throws SampleRateTooLow when natural_frequency >= pi *
/// sample_rate.
BiquadCoeffs discretize(const BdftParams& p, double sample_rate, bool prewarp = false);

/// Discrete-time response of the bilinear discretization, zero initial
/// conditions, same length and rate as the input.
TimeSeries simulate_response(const BdftParams& p, const TimeSeries& input, bool prewarp = false);

/// Dominant time constant 1 / (zeta * wn), seconds.
double time_constant(const BdftParams& p);

/// Time for transients to decay below ~exp(-n): n time constants.
double settling_time(const BdftParams& p, double n_time_constants = 5.0);

/// Drops the leading transient window (n time constants) from a series.
/// Used for steady-state comparisons; identification theory assumes periodic
/// steady state.
TimeSeries discard_transient(const TimeSeries& ts, const BdftParams& p,
                             double n_time_constants = 5.0);

/// Per-parameter linear coefficients with respect to a scheduling variable.
struct LpvSensitivities {
    double gain = 0.0;
    double natural_frequency = 0.0;
    double damping_ratio = 0.0;
};

/// Affine schedule of the model parameters in one measured scheduling
/// variable (e.g. perturbation RMS):
///
///   param(v) = base_param + sensitivity * (v - reference_value)
///
/// Valid over [range_min, range_max]; construction rejects schedules whose
/// evaluated parameters would leave the BdftParams domain anywhere in range.
struct LpvSchedule {
    BdftParams base;
    LpvSensitivities sensitivities;
    std::string variable_name;
    double reference_value = 0.0;
    double range_min = 0.0;
    double range_max = 0.0;
};

/// Validates and returns the schedule. Affine parameters are positive over
/// the whole range iff they are positive at both endpoints.
LpvSchedule make_lpv_schedule(const BdftParams& base, const LpvSensitivities& sens,
                              std::string variable_name, double reference_value,
                              double range_min, double range_max);

/// Evaluates the schedule at one value of the scheduling variable. Throws
/// OutOfRange outside [range_min, range_max], InvalidResult if the evaluated
/// parameters are invalid (guarded against by make_lpv_schedule).
BdftParams evaluate_schedule(const LpvSchedule& schedule, double variable_value);

}  // namespace bdft
