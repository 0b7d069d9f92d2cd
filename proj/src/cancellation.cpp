// SPDX-License-Identifier: Apache-2.0
#include "bdft/cancellation.hpp"

namespace bdft {

Canceller::Canceller(const BdftParams& params, double sample_rate, bool prewarp)
    : params_(params),
      sample_rate_(sample_rate),
      prewarp_(prewarp),
      filter_(discretize(params, sample_rate, prewarp)) {}

Canceller Canceller::retuned(const BdftParams& params) const {
    Canceller next = *this;  // carries the filter state across the swap
    next.params_ = params;
    next.filter_.set_coeffs(discretize(params, sample_rate_, prewarp_));
    return next;
}

Canceller update_params(const Canceller& state, const LpvSchedule& schedule,
                        double variable_value) {
    return state.retuned(evaluate_schedule(schedule, variable_value));
}

std::pair<TimeSeries, TimeSeries> cancel_batch(const Trial& trial, const BdftParams& params_y,
                                               const BdftParams& params_z, bool prewarp) {
    validate(trial);

    auto cancel_axis = [prewarp](const TimeSeries& perturbation, const TimeSeries& recorded,
                                 const BdftParams& params) {
        const TimeSeries predicted = simulate_response(params, perturbation, prewarp);
        TimeSeries out;
        out.sample_rate = recorded.sample_rate;
        out.samples.resize(recorded.samples.size());
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] = recorded.samples[i] - predicted.samples[i];
        return out;
    };

    return {cancel_axis(trial.perturbation_y, trial.recorded_y, params_y),
            cancel_axis(trial.perturbation_z, trial.recorded_z, params_z)};
}

}  // namespace bdft
