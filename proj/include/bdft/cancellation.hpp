// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "bdft/bdft_model.hpp"
#include "bdft/biquad.hpp"
#include "bdft/simulator.hpp"
#include "bdft/types.hpp"

namespace bdft {

/// Streaming model-based canceller for one input axis. Feeds measured
/// vehicle acceleration through the discretized feedthrough model and
/// subtracts the prediction from the touch input:
///
///   u_can[n] = u[n] - (H_bdft filter)(f_d[0..n])
///
/// Causal, constant cost per sample, two-sample internal state. One stream
/// owner advances a canceller; independent instances are safe to drive from
/// independent threads.
class Canceller {
public:
    /// Throws SampleRateTooLow as discretize() does.
    Canceller(const BdftParams& params, double sample_rate, bool prewarp = false);

    /// One sample step: returns u_sample minus the model prediction for
    /// fd_sample, advancing the filter state by exactly one sample.
    double push(double fd_sample, double u_sample) {
        return u_sample - filter_.step(fd_sample);
    }

    /// Clears the filter state; a reset-then-replay reproduces the original
    /// output sequence exactly.
    void reset() { filter_.reset(); }

    /// Copy with coefficients recomputed for new parameters; the internal
    /// filter state is carried over unchanged, so the swap is bumpless up to
    /// a bounded settling transient.
    Canceller retuned(const BdftParams& params) const;

    const BdftParams& params() const { return params_; }
    double sample_rate() const { return sample_rate_; }

private:
    BdftParams params_;
    double sample_rate_ = 0.0;
    bool prewarp_ = false;
    Biquad filter_;
};

/// Schedule-driven retune: evaluates the LPV schedule at the current value of
/// the scheduling variable and swaps coefficients while keeping the filter
/// state. Throws OutOfRange outside the schedule range.
Canceller update_params(const Canceller& state, const LpvSchedule& schedule,
                        double variable_value);

/// Batch cancellation of a whole trial, per axis:
///
///   u_can = recorded - simulate_response(params, perturbation)
///
/// Identical (to the last bit) to folding Canceller::push over the samples.
std::pair<TimeSeries, TimeSeries> cancel_batch(const Trial& trial, const BdftParams& params_y,
                                               const BdftParams& params_z,
                                               bool prewarp = false);

}  // namespace bdft
