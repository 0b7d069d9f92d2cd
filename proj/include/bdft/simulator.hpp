// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bdft/bdft_model.hpp"
#include "bdft/multisine.hpp"
#include "bdft/types.hpp"

namespace bdft {

// Touchscreen working area, mm. Positions are not clipped at the edges;
// clipping would make the feedthrough path nonlinear. Excursions are counted
// instead.
inline constexpr double kScreenWidthMm = 150.0;
inline constexpr double kScreenHeightMm = 100.0;

/// Ground-truth user model for synthetic trials: per-axis feedthrough
/// dynamics plus a first-order-lag tracking response with band-limited
/// Gaussian remnant noise.
struct SyntheticParticipant {
    BdftParams bdft_y;
    BdftParams bdft_z;
    double tracking_bandwidth = 4.0;  // rad/s, lag on reference following
    double remnant_level = 0.0;       // mm RMS of the remnant noise
    std::uint64_t rng_seed = 0;
};

void validate(const SyntheticParticipant& p);

enum class ReferenceKind { kFixedPoint, kLissajous, kRampHold };

ReferenceKind reference_kind_from_string(const std::string& s);
std::string to_string(ReferenceKind kind);

struct ReferenceOptions {
    double center_y = kScreenWidthMm / 2.0;
    double center_z = kScreenHeightMm / 2.0;
    double amp_y = 18.0;  // mm, lissajous only
    double amp_z = 12.0;
};

/// Commanded 2-D finger trajectory plus the metadata the trial builder needs
/// to keep the voluntary component spectrally clean.
struct ReferenceTrajectory {
    TimeSeries y;
    TimeSeries z;
    bool periodic = false;                 // exactly periodic over its own record
    std::vector<double> line_freqs_hz;     // discrete spectral lines, if line-based
};

/// Piecewise-linear knot schedule used by the ramp-hold reference:
/// hold-ramp-hold-ramp-hold between three seed-drawn screen points.
struct RampHoldKnot {
    double t = 0.0;
    double y = 0.0;
    double z = 0.0;
};

std::vector<RampHoldKnot> ramp_hold_knots(double duration, std::uint64_t seed,
                                          const ReferenceOptions& options = {});

/// Generates a smooth 2-D reference inside the screen box. Fixed-point is a
/// constant seed-drawn point; lissajous uses two distinct low-frequency lines
/// commensurate with the record; ramp-hold interpolates ramp_hold_knots.
/// Deterministic per seed.
ReferenceTrajectory make_reference(ReferenceKind kind, double duration, double sample_rate,
                                   std::uint64_t seed, const ReferenceOptions& options = {});

/// One synthetic (or ingested) recording. Channels share sample rate and
/// length. Ingested real recordings carry only perturbation and recorded
/// input; reference, voluntary, and truth channels are simulator-side ground
/// truth.
struct Trial {
    TimeSeries perturbation_y, perturbation_z;  // m/s^2
    TimeSeries recorded_y, recorded_z;          // mm
    std::optional<TimeSeries> reference_y, reference_z;
    std::optional<TimeSeries> voluntary_y, voluntary_z;
    std::optional<TimeSeries> truth_bdft_y, truth_bdft_z;
    std::size_t offscreen_samples = 0;  // recorded positions outside the screen box
};

void validate(const Trial& trial);

/// How the ground-truth feedthrough channel is synthesized.
///
/// kAnalytic evaluates the exact periodic steady-state response of the
/// continuous model per sine component (the identification-theory reading of
/// the signal flow: bins carry exactly H(jw_d)). kDiscretized runs the
/// bilinear-discretized filter from zero initial conditions, which is the
/// same path model-based cancellation uses, so truth-parameter cancellation
/// inverts the construction sample for sample.
enum class BdftSynthesis { kAnalytic, kDiscretized };

struct TrialOptions {
    BdftSynthesis synthesis = BdftSynthesis::kAnalytic;
    /// Reject references whose voluntary response carries power at the
    /// excitation bins (required for unbiased identification).
    bool enforce_spectral_separation = true;
};

/// Realizes the trial signal flow: voluntary tracking of the reference
/// through a first-order lag, additive band-limited Gaussian remnant, and
/// additive feedthrough response to the multisine perturbation (the same
/// perturbation drives both axes through their own dynamics).
///
/// recorded = voluntary + remnant + truth_bdft, asserted sample-wise.
/// Deterministic given the participant seed.
Trial run_trial(const SyntheticParticipant& participant, const ReferenceTrajectory& reference,
                const MultisineSpec& perturbation_spec, double sample_rate, double duration,
                const TrialOptions& options = {});

/// Draws n participants around `base` with log-normally perturbed feedthrough
/// parameters: each of G, wn, zeta is multiplied by exp(N(0, spread)),
/// independently per axis and parameter. Remnant seeds are re-drawn so trials
/// differ across the population. Deterministic per seed.
std::vector<SyntheticParticipant> make_population(int n, double spread,
                                                  const SyntheticParticipant& base,
                                                  std::uint64_t seed);

}  // namespace bdft
