// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "bdft/types.hpp"

namespace bdft {

/// One sinusoid of a multisine perturbation.
struct SineComponent {
    double amplitude = 0.0;    // m/s^2
    double freq_rad_s = 0.0;   // rad/s
    double phase_rad = 0.0;    // rad, stored normalized to [0, 2*pi)
};

/// Periodic sum-of-sines acceleration perturbation:
///   f_d(t) = sum_k A_k * sin(w_k * t + phi_k)
///
/// Frequencies are strictly positive and pairwise distinct; amplitudes are
/// non-negative. Specs with all-zero amplitudes are representable (they
/// generate a zero signal); operations that need actual excitation power
/// reject them individually.
class MultisineSpec {
public:
    MultisineSpec() = default;

    /// Normalizes phases into [0, 2*pi) and validates the invariants above.
    explicit MultisineSpec(std::vector<SineComponent> components);

    const std::vector<SineComponent>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    bool empty() const { return components_.empty(); }

    double min_freq_rad_s() const;
    double max_freq_rad_s() const;

    /// True if at least one amplitude is strictly positive.
    bool has_power() const;

    /// RMS of the generated signal over an integer number of periods,
    /// sqrt(sum A_k^2 / 2).
    double analytic_rms() const;

private:
    std::vector<SineComponent> components_;
};

/// Samples the multisine on a uniform grid: samples[i] = f_d(i / sample_rate),
/// length round(duration * sample_rate).
///
/// Throws NyquistViolation if any component frequency is at or above
/// sample_rate / 2, EmptySpec for a component-free spec.
TimeSeries generate_multisine(const MultisineSpec& spec, double sample_rate, double duration);

/// Peak-to-RMS ratio max|x| / rms(x). Throws ZeroSignal when rms(x) == 0.
double crest_factor(const TimeSeries& series);

/// Crest factor of the spec evaluated on the canonical design grid: the
/// signal's fundamental period (recovered by an approximate GCD of the
/// component frequencies) sampled well above Nyquist. This is the objective
/// minimized by randomize_phases.
double design_crest_factor(const MultisineSpec& spec);

/// Draws `trials` uniform random phase sets and returns the spec with the
/// lowest design_crest_factor. Amplitudes and frequencies are unchanged.
/// Deterministic given seed; trial sets are nested, so the best-seen crest
/// factor never increases as `trials` grows.
MultisineSpec randomize_phases(const MultisineSpec& spec, std::uint64_t seed, int trials);

/// One sample of a target acceleration power spectral density.
struct PsdPoint {
    double freq_hz = 0.0;
    double psd = 0.0;  // (m/s^2)^2 / Hz
};

/// Throws ValidationError unless points are non-empty with strictly
/// increasing frequencies and non-negative densities.
void validate_psd(const std::vector<PsdPoint>& psd);

/// Designs a multisine approximating a target vehicle PSD over `band_hz`.
///
/// Component frequencies are log-spaced over the band and snapped to the
/// commensurate grid of `record_length_s` (so a record of that length holds
/// an integer number of periods of every component); snapped lines are bumped
/// upward to stay pairwise distinct and to avoid exact integer harmonic
/// overlap. Amplitudes satisfy A_k^2 / 2 = integral of the PSD over the
/// frequency bin owned by component k, with bin edges at geometric midpoints,
/// so the total signal variance matches the band-limited PSD integral.
///
/// Throws BandEmpty when the PSD carries no power inside the band.
MultisineSpec fit_multisine_to_psd(const std::vector<PsdPoint>& target_psd,
                                   int n_components,
                                   std::pair<double, double> band_hz,
                                   double record_length_s = 60.0);

/// Rescales all amplitudes so analytic_rms() == target_rms.
MultisineSpec scaled_to_rms(const MultisineSpec& spec, double target_rms);

/// Maps each component frequency to its DFT bin on a record of n_samples:
/// bin = f_hz * n_samples / sample_rate. Every bin must be integer within
/// 1e-9 (NonCommensurate otherwise) and below n_samples / 2
/// (NyquistViolation). Returned indices are strictly increasing.
std::vector<std::size_t> excitation_bins(const MultisineSpec& spec,
                                         double sample_rate,
                                         std::size_t n_samples);

/// Built-in illustrative target PSDs: "road" (lateral, 0.5-8 Hz), "air"
/// (vertical, 1-10 Hz), "water" (vertical, 0.05-0.5 Hz). Shapes are
/// qualitative presets for desk-scale experiments, not measured vehicle data.
std::vector<PsdPoint> vehicle_psd_preset(std::string_view name);

}  // namespace bdft
