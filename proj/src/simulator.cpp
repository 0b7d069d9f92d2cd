// SPDX-License-Identifier: Apache-2.0
#include "bdft/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "bdft/rng.hpp"
#include "dft_util.hpp"

namespace bdft {

void validate(const SyntheticParticipant& p) {
    validate(p.bdft_y);
    validate(p.bdft_z);
    if (!(p.tracking_bandwidth > 0.0))
        throw ValidationError("tracking bandwidth must be strictly positive");
    if (p.remnant_level < 0.0 || !std::isfinite(p.remnant_level))
        throw ValidationError("remnant level must be non-negative");
}

ReferenceKind reference_kind_from_string(const std::string& s) {
    if (s == "fixed-point") return ReferenceKind::kFixedPoint;
    if (s == "lissajous") return ReferenceKind::kLissajous;
    if (s == "ramp-hold") return ReferenceKind::kRampHold;
    throw ValidationError("unknown reference kind: " + s);
}

std::string to_string(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::kFixedPoint: return "fixed-point";
        case ReferenceKind::kLissajous: return "lissajous";
        case ReferenceKind::kRampHold: return "ramp-hold";
    }
    return "?";
}

std::vector<RampHoldKnot> ramp_hold_knots(double duration, std::uint64_t seed,
                                          const ReferenceOptions& options) {
    if (!(duration > 0.0)) throw ValidationError("duration must be positive");
    Rng rng(seed);
    auto draw_point = [&](double& y, double& z) {
        y = std::clamp(options.center_y + rng.uniform(-2.0, 2.0) * options.amp_y, 5.0,
                       kScreenWidthMm - 5.0);
        z = std::clamp(options.center_z + rng.uniform(-2.0, 2.0) * options.amp_z, 5.0,
                       kScreenHeightMm - 5.0);
    };
    double y0, z0, y1, z1, y2, z2;
    draw_point(y0, z0);
    draw_point(y1, z1);
    draw_point(y2, z2);
    // hold - ramp - hold - ramp - hold
    return {{0.0, y0, z0},
            {duration / 6.0, y0, z0},
            {duration / 3.0, y1, z1},
            {duration / 2.0, y1, z1},
            {2.0 * duration / 3.0, y2, z2},
            {duration, y2, z2}};
}

ReferenceTrajectory make_reference(ReferenceKind kind, double duration, double sample_rate,
                                   std::uint64_t seed, const ReferenceOptions& options) {
    if (!(duration > 0.0) || !(sample_rate > 0.0))
        throw ValidationError("duration and sample rate must be positive");
    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    if (n == 0) throw ValidationError("duration too short for one sample");

    ReferenceTrajectory out;
    out.y.sample_rate = out.z.sample_rate = sample_rate;
    out.y.samples.resize(n);
    out.z.samples.resize(n);

    Rng rng(seed);
    switch (kind) {
        case ReferenceKind::kFixedPoint: {
            const double y0 = options.center_y + rng.uniform(-1.0, 1.0) * options.amp_y;
            const double z0 = options.center_z + rng.uniform(-1.0, 1.0) * options.amp_z;
            std::fill(out.y.samples.begin(), out.y.samples.end(), y0);
            std::fill(out.z.samples.begin(), out.z.samples.end(), z0);
            out.periodic = true;
            break;
        }
        case ReferenceKind::kLissajous: {
            // Two distinct low lines on the exact bin grid of the record, so
            // the trajectory is exactly periodic and spectrally clean.
            const int jy = rng.uniform_int(3, 7);
            int jz = rng.uniform_int(4, 9);
            while (jz == jy) jz = rng.uniform_int(4, 9);
            const double phase_z = rng.uniform(0.0, kTwoPi);
            const double nd = static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double c = kTwoPi * static_cast<double>(i) / nd;
                out.y.samples[i] = options.center_y + options.amp_y * std::sin(jy * c);
                out.z.samples[i] = options.center_z + options.amp_z * std::sin(jz * c + phase_z);
            }
            out.periodic = true;
            out.line_freqs_hz = {jy * sample_rate / nd, jz * sample_rate / nd};
            break;
        }
        case ReferenceKind::kRampHold: {
            const auto knots = ramp_hold_knots(duration, seed, options);
            std::size_t seg = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) / sample_rate;
                while (seg + 2 < knots.size() && t > knots[seg + 1].t) ++seg;
                const auto& k0 = knots[seg];
                const auto& k1 = knots[seg + 1];
                const double a = (t - k0.t) / (k1.t - k0.t);
                out.y.samples[i] = k0.y + a * (k1.y - k0.y);
                out.z.samples[i] = k0.z + a * (k1.z - k0.z);
            }
            out.periodic = false;
            break;
        }
    }
    return out;
}

void validate(const Trial& trial) {
    validate(trial.perturbation_y);
    validate(trial.recorded_y);
    require_same_grid(trial.perturbation_y, trial.perturbation_z);
    require_same_grid(trial.perturbation_y, trial.recorded_y);
    require_same_grid(trial.recorded_y, trial.recorded_z);
    for (const auto* opt : {&trial.reference_y, &trial.reference_z, &trial.voluntary_y,
                            &trial.voluntary_z, &trial.truth_bdft_y, &trial.truth_bdft_z}) {
        if (opt->has_value()) {
            validate(**opt);
            require_same_grid(trial.recorded_y, **opt);
        }
    }
}

namespace {

// First-order-lag tracking response in periodic steady state. Priming at the
// first reference sample removes the startup step; for periodic references a
// warm-up pass over one full record settles the filter onto the periodic
// solution, so the voluntary component carries exactly the reference lines.
TimeSeries track_reference(const TimeSeries& ref, double bandwidth, bool periodic) {
    FirstOrderLag lag(bandwidth, ref.sample_rate);
    lag.prime(ref.samples.front());
    if (periodic)
        for (double x : ref.samples) lag.step(x);
    TimeSeries out;
    out.sample_rate = ref.sample_rate;
    out.samples.resize(ref.samples.size());
    for (std::size_t i = 0; i < ref.samples.size(); ++i) out.samples[i] = lag.step(ref.samples[i]);
    return out;
}

TimeSeries make_remnant(std::size_t n, double sample_rate, double bandwidth, double level,
                        Rng& rng) {
    TimeSeries out;
    out.sample_rate = sample_rate;
    out.samples.resize(n);
    FirstOrderLag lag(bandwidth, sample_rate);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = lag.step(rng.gaussian());
    const double r = rms(out.samples);
    if (r > 0.0) {
        const double scale = level / r;
        for (double& v : out.samples) v *= scale;
    }
    return out;
}

// Exact periodic steady-state response of the continuous model to the
// multisine: each sine maps to |H| and arg H at its own frequency.
TimeSeries analytic_bdft_response(const BdftParams& params, const MultisineSpec& spec,
                                  double sample_rate, std::size_t n) {
    TimeSeries out;
    out.sample_rate = sample_rate;
    out.samples.assign(n, 0.0);
    for (const auto& c : spec.components()) {
        if (c.amplitude == 0.0) continue;
        const std::complex<double> h = frf_value(params, c.freq_rad_s);
        const double amp = c.amplitude * std::abs(h);
        const double phase = c.phase_rad + std::arg(h);
        const double w = c.freq_rad_s / sample_rate;
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] += amp * std::sin(w * static_cast<double>(i) + phase);
    }
    return out;
}

void check_spectral_separation(const TimeSeries& voluntary,
                               const std::vector<std::size_t>& bins, const char* axis) {
    const double scale = std::max(1.0, peak_abs(voluntary.samples));
    const double nd = static_cast<double>(voluntary.samples.size());
    for (std::size_t bin : bins) {
        const double amp = 2.0 * std::abs(detail::dft_bin(voluntary.samples, bin)) / nd;
        if (amp > 1e-7 * scale)
            throw SpectralOverlap(std::string("voluntary ") + axis + " response carries " +
                                  std::to_string(amp) + " mm at excitation bin " +
                                  std::to_string(bin) +
                                  "; choose a reference clear of the excitation lines");
    }
}

}  // namespace

Trial run_trial(const SyntheticParticipant& participant, const ReferenceTrajectory& reference,
                const MultisineSpec& perturbation_spec, double sample_rate, double duration,
                const TrialOptions& options) {
    validate(participant);
    validate(reference.y);
    validate(reference.z);
    require_same_grid(reference.y, reference.z);

    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    if (n == 0) throw ValidationError("duration too short for one sample");
    if (reference.y.samples.size() != n ||
        std::abs(reference.y.sample_rate - sample_rate) > 1e-9 * sample_rate)
        throw ValidationError("reference trajectory does not match the trial grid");

    // Integer periods of every excitation line (and Nyquist headroom).
    const auto bins = excitation_bins(perturbation_spec, sample_rate, n);

    Trial trial;
    trial.perturbation_y = generate_multisine(perturbation_spec, sample_rate, duration);
    trial.perturbation_z = trial.perturbation_y;
    trial.reference_y = reference.y;
    trial.reference_z = reference.z;

    TimeSeries vol_y = track_reference(reference.y, participant.tracking_bandwidth,
                                       reference.periodic);
    TimeSeries vol_z = track_reference(reference.z, participant.tracking_bandwidth,
                                       reference.periodic);
    if (options.enforce_spectral_separation && perturbation_spec.has_power()) {
        check_spectral_separation(vol_y, bins, "y");
        check_spectral_separation(vol_z, bins, "z");
    }

    TimeSeries rem_y, rem_z;
    rem_y.sample_rate = rem_z.sample_rate = sample_rate;
    if (participant.remnant_level > 0.0) {
        Rng rng(participant.rng_seed);
        rem_y = make_remnant(n, sample_rate, participant.tracking_bandwidth,
                             participant.remnant_level, rng);
        rem_z = make_remnant(n, sample_rate, participant.tracking_bandwidth,
                             participant.remnant_level, rng);
    } else {
        rem_y.samples.assign(n, 0.0);
        rem_z.samples.assign(n, 0.0);
    }

    TimeSeries truth_y, truth_z;
    if (options.synthesis == BdftSynthesis::kAnalytic) {
        truth_y = analytic_bdft_response(participant.bdft_y, perturbation_spec, sample_rate, n);
        truth_z = analytic_bdft_response(participant.bdft_z, perturbation_spec, sample_rate, n);
    } else {
        truth_y = simulate_response(participant.bdft_y, trial.perturbation_y);
        truth_z = simulate_response(participant.bdft_z, trial.perturbation_z);
    }

    trial.recorded_y.sample_rate = trial.recorded_z.sample_rate = sample_rate;
    trial.recorded_y.samples.resize(n);
    trial.recorded_z.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        trial.recorded_y.samples[i] = vol_y.samples[i] + rem_y.samples[i] + truth_y.samples[i];
        trial.recorded_z.samples[i] = vol_z.samples[i] + rem_z.samples[i] + truth_z.samples[i];
        if (trial.recorded_y.samples[i] < 0.0 || trial.recorded_y.samples[i] > kScreenWidthMm ||
            trial.recorded_z.samples[i] < 0.0 || trial.recorded_z.samples[i] > kScreenHeightMm)
            ++trial.offscreen_samples;
    }

    // construction identity: recorded = voluntary + remnant + truth
    for (std::size_t i = 0; i < n; ++i) {
        if (trial.recorded_y.samples[i] !=
                vol_y.samples[i] + rem_y.samples[i] + truth_y.samples[i] ||
            trial.recorded_z.samples[i] !=
                vol_z.samples[i] + rem_z.samples[i] + truth_z.samples[i])
            throw Error("trial construction identity violated");
    }

    trial.voluntary_y = std::move(vol_y);
    trial.voluntary_z = std::move(vol_z);
    trial.truth_bdft_y = std::move(truth_y);
    trial.truth_bdft_z = std::move(truth_z);
    return trial;
}

std::vector<SyntheticParticipant> make_population(int n, double spread,
                                                  const SyntheticParticipant& base,
                                                  std::uint64_t seed) {
    validate(base);
    if (n < 1) throw ValidationError("population size must be at least 1");
    if (spread < 0.0) throw ValidationError("population spread must be non-negative");

    Rng rng(seed);
    std::vector<SyntheticParticipant> population;
    population.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        SyntheticParticipant p = base;
        for (BdftParams* params : {&p.bdft_y, &p.bdft_z}) {
            params->gain *= std::exp(spread * rng.gaussian());
            params->natural_frequency *= std::exp(spread * rng.gaussian());
            params->damping_ratio *= std::exp(spread * rng.gaussian());
        }
        p.rng_seed = rng.next_u64();
        validate(p);
        population.push_back(p);
    }
    return population;
}

}  // namespace bdft
