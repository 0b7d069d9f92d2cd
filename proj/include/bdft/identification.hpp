// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bdft/bdft_model.hpp"
#include "bdft/multisine.hpp"
#include "bdft/types.hpp"

namespace bdft {

/// Nonparametric frequency response estimate at the excitation bins:
///
///   H_hat(jw_d) = S_fu(jw_d) / S_ff(jw_d)
///
/// computed from full-record DFTs at the exact excitation bins (the
/// commensurate multisine design makes the bins leakage-free, so no window
/// is applied). When the record holds P >= 2 periods of the signal
/// fundamental, the ratio is averaged over per-period estimates and each
/// point's coherence weight is 1 - var(per-period estimates) / |mean|^2,
/// clamped to [0, 1]; with a single period the weight is 1.
///
/// Throws NonCommensurate when any excitation frequency does not complete an
/// integer number of periods, ZeroExcitation when the perturbation carries
/// (essentially) no power at a bin.
FrequencyResponse estimate_frf(const TimeSeries& perturbation, const TimeSeries& response,
                               const MultisineSpec& spec);

/// Outcome of a parametric model fit.
struct FitResult {
    BdftParams params;
    double residual = 0.0;  // weighted complex least-squares cost
    int iterations = 0;
    bool converged = false;
    std::vector<double> cost_history;  // accepted costs, non-increasing
};

/// Fits the second-order model to a measured frequency response by damped
/// Gauss-Newton on the weighted complex residual
///
///   sum_k w_k |H_hat(jw_k) - H(jw_k; G, wn, zeta)|^2
///
/// with wn and zeta log-parameterized (kept positive). Without an initial
/// guess, 5 multi-starts are used: wn log-spaced over the excitation band,
/// zeta alternating {0.2, 0.7}, G from |H_hat| at the lowest bin. Convergence
/// when the relative cost change drops below 1e-10, up to 500 iterations;
/// on iteration exhaustion the best-so-far is returned with converged=false.
///
/// Throws TooFewPoints with fewer than 3 frequency points.
FitResult fit_bdft_model(const FrequencyResponse& frf,
                         std::optional<BdftParams> init = std::nullopt);

/// Variance Accounted For, percent:
///
///   100 * (1 - var(measured - predicted) / var(measured))
///
/// Negative values are meaningful (model worse than predicting the mean) and
/// returned unclamped. Throws ZeroVariance when the measured series has no
/// variance.
double vaf(const TimeSeries& measured, const TimeSeries& predicted);

/// Ordinary least-squares line through (variable, parameter) pairs for each
/// of the three model parameters. The schedule's reference point is the mean
/// variable value and its range is [min, max] of the observed values.
/// Throws DegenerateVariable when all variable values coincide.
LpvSchedule fit_lpv_schedule(const std::vector<std::pair<double, BdftParams>>& per_condition_fits,
                             std::string variable_name = "perturbation_rms");

}  // namespace bdft
