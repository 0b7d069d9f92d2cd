// SPDX-License-Identifier: Apache-2.0
#include "bdft/multisine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bdft/rng.hpp"

namespace bdft {

namespace {

double normalize_phase(double phi) {
    double p = std::fmod(phi, kTwoPi);
    if (p < 0.0) p += kTwoPi;
    // fmod can land exactly on 2*pi after the wrap
    if (p >= kTwoPi) p = 0.0;
    return p;
}

// Approximate GCD of a frequency set (Hz), tolerant of floating-point noise.
// Returns 0 when the set is not commensurate to within the tolerance.
double approx_gcd_hz(const std::vector<double>& freqs_hz) {
    const double tol = 1e-9 * *std::max_element(freqs_hz.begin(), freqs_hz.end());
    double g = freqs_hz[0];
    for (std::size_t i = 1; i < freqs_hz.size(); ++i) {
        double a = std::max(g, freqs_hz[i]);
        double b = std::min(g, freqs_hz[i]);
        while (b > tol) {
            double r = std::fmod(a, b);
            if (r > b - tol) r = 0.0;  // a is an (approximate) multiple of b
            a = b;
            b = r;
        }
        g = a;
        if (g <= tol) return 0.0;
    }
    return g;
}

// Piecewise-linear integral of the PSD polyline over [a, b].
double psd_integral(const std::vector<PsdPoint>& psd, double a, double b) {
    if (b <= a) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < psd.size(); ++i) {
        const double f0 = psd[i].freq_hz, f1 = psd[i + 1].freq_hz;
        const double lo = std::max(a, f0), hi = std::min(b, f1);
        if (hi <= lo) continue;
        const double slope = (psd[i + 1].psd - psd[i].psd) / (f1 - f0);
        const double p_lo = psd[i].psd + slope * (lo - f0);
        const double p_hi = psd[i].psd + slope * (hi - f0);
        acc += 0.5 * (p_lo + p_hi) * (hi - lo);
    }
    return acc;
}

}  // namespace

MultisineSpec::MultisineSpec(std::vector<SineComponent> components)
    : components_(std::move(components)) {
    for (auto& c : components_) {
        if (!std::isfinite(c.amplitude) || !std::isfinite(c.freq_rad_s) ||
            !std::isfinite(c.phase_rad))
            throw ValidationError("multisine component is not finite");
        if (!(c.freq_rad_s > 0.0))
            throw ValidationError("multisine frequencies must be strictly positive");
        if (c.amplitude < 0.0)
            throw ValidationError("multisine amplitudes must be non-negative");
        c.phase_rad = normalize_phase(c.phase_rad);
    }
    for (std::size_t i = 0; i < components_.size(); ++i) {
        for (std::size_t j = i + 1; j < components_.size(); ++j) {
            const double fi = components_[i].freq_rad_s, fj = components_[j].freq_rad_s;
            if (std::abs(fi - fj) <= 1e-12 * std::max(fi, fj))
                throw ValidationError("multisine frequencies must be pairwise distinct");
        }
    }
}

double MultisineSpec::min_freq_rad_s() const {
    if (components_.empty()) throw EmptySpec("multisine spec has no components");
    double m = components_[0].freq_rad_s;
    for (const auto& c : components_) m = std::min(m, c.freq_rad_s);
    return m;
}

double MultisineSpec::max_freq_rad_s() const {
    if (components_.empty()) throw EmptySpec("multisine spec has no components");
    double m = components_[0].freq_rad_s;
    for (const auto& c : components_) m = std::max(m, c.freq_rad_s);
    return m;
}

bool MultisineSpec::has_power() const {
    for (const auto& c : components_)
        if (c.amplitude > 0.0) return true;
    return false;
}

double MultisineSpec::analytic_rms() const {
    double acc = 0.0;
    for (const auto& c : components_) acc += 0.5 * c.amplitude * c.amplitude;
    return std::sqrt(acc);
}

TimeSeries generate_multisine(const MultisineSpec& spec, double sample_rate, double duration) {
    if (spec.empty()) throw EmptySpec("multisine spec has no components");
    if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
    if (!(duration > 0.0)) throw ValidationError("duration must be positive");
    for (const auto& c : spec.components()) {
        if (c.freq_rad_s / kTwoPi >= 0.5 * sample_rate)
            throw NyquistViolation("component at " + std::to_string(c.freq_rad_s / kTwoPi) +
                                   " Hz is at or above Nyquist for fs=" +
                                   std::to_string(sample_rate) + " Hz");
    }

    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    if (n == 0) throw ValidationError("duration too short for one sample");

    TimeSeries out;
    out.sample_rate = sample_rate;
    out.samples.assign(n, 0.0);
    for (const auto& c : spec.components()) {
        if (c.amplitude == 0.0) continue;
        const double w = c.freq_rad_s / sample_rate;  // rad per sample
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] += c.amplitude * std::sin(w * static_cast<double>(i) + c.phase_rad);
    }
    return out;
}

double crest_factor(const TimeSeries& series) {
    validate(series);
    const double r = rms(series.samples);
    if (r == 0.0) throw ZeroSignal("crest factor undefined for an all-zero signal");
    return peak_abs(series.samples) / r;
}

double design_crest_factor(const MultisineSpec& spec) {
    if (spec.empty()) throw EmptySpec("multisine spec has no components");
    if (!spec.has_power()) throw ZeroSignal("crest factor undefined for a zero-amplitude spec");

    std::vector<double> freqs_hz;
    freqs_hz.reserve(spec.size());
    for (const auto& c : spec.components()) freqs_hz.push_back(c.freq_rad_s / kTwoPi);

    const double f_min = *std::min_element(freqs_hz.begin(), freqs_hz.end());
    const double f_max = *std::max_element(freqs_hz.begin(), freqs_hz.end());

    // One fundamental period when the set is commensurate, a slow-component
    // multiple otherwise. Dense sampling bounds the peak-scan error.
    double period = 8.0 / f_min;
    const double g = approx_gcd_hz(freqs_hz);
    if (g > 0.0 && 1.0 / g <= 64.0 / f_min) period = 1.0 / g;

    const double fs = 32.0 * f_max;
    return crest_factor(generate_multisine(spec, fs, period));
}

MultisineSpec randomize_phases(const MultisineSpec& spec, std::uint64_t seed, int trials) {
    if (trials < 1) throw ValidationError("phase randomization needs at least one trial");
    if (spec.empty()) throw EmptySpec("multisine spec has no components");
    if (!spec.has_power()) throw ZeroSignal("phase randomization needs a nonzero-amplitude spec");

    Rng rng(seed);
    std::vector<SineComponent> best;
    double best_crest = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<SineComponent> cand = spec.components();
        for (auto& c : cand) c.phase_rad = rng.uniform(0.0, kTwoPi);
        const double crest = design_crest_factor(MultisineSpec(cand));
        if (best.empty() || crest < best_crest) {
            best = std::move(cand);
            best_crest = crest;
        }
    }
    return MultisineSpec(std::move(best));
}

void validate_psd(const std::vector<PsdPoint>& psd) {
    if (psd.empty()) throw ValidationError("PSD table is empty");
    for (std::size_t i = 0; i < psd.size(); ++i) {
        if (!std::isfinite(psd[i].freq_hz) || !std::isfinite(psd[i].psd))
            throw ValidationError("PSD row " + std::to_string(i) + " is not finite");
        if (psd[i].psd < 0.0)
            throw ValidationError("PSD row " + std::to_string(i) + " has negative density");
        if (i > 0 && !(psd[i].freq_hz > psd[i - 1].freq_hz))
            throw ValidationError("PSD frequencies must be strictly increasing (row " +
                                  std::to_string(i) + ")");
    }
}

MultisineSpec fit_multisine_to_psd(const std::vector<PsdPoint>& target_psd, int n_components,
                                   std::pair<double, double> band_hz, double record_length_s) {
    validate_psd(target_psd);
    if (n_components < 1) throw ValidationError("need at least one component");
    if (!(record_length_s > 0.0)) throw ValidationError("record length must be positive");
    const double lo = band_hz.first, hi = band_hz.second;
    if (!(lo > 0.0) || !(hi > lo)) throw ValidationError("band must satisfy 0 < lo < hi");
    if (lo < target_psd.front().freq_hz || hi > target_psd.back().freq_hz)
        throw ValidationError("band extends outside the PSD frequency range");
    if (psd_integral(target_psd, lo, hi) <= 0.0)
        throw BandEmpty("target PSD has no power inside the band");

    // Log-spaced target lines, snapped to the commensurate grid of the record.
    std::vector<double> raw(n_components);
    if (n_components == 1) {
        raw[0] = std::sqrt(lo * hi);
    } else {
        const double ratio = hi / lo;
        for (int k = 0; k < n_components; ++k)
            raw[k] = lo * std::pow(ratio, static_cast<double>(k) / (n_components - 1));
    }

    std::set<long long> taken;
    std::vector<double> freqs_hz(n_components);
    for (int k = 0; k < n_components; ++k) {
        long long line = std::llround(raw[k] * record_length_s);
        if (line < 1) line = 1;
        auto clashes = [&](long long cand) {
            if (taken.count(cand)) return true;
            for (long long prev : taken)
                if (cand % prev == 0) return true;  // exact integer harmonic
            return false;
        };
        const long long max_line = std::llround(hi * record_length_s) + n_components;
        while (clashes(line)) {
            ++line;
            if (line > max_line)
                throw ValidationError("cannot place " + std::to_string(n_components) +
                                      " distinct non-harmonic lines in the band");
        }
        taken.insert(line);
        freqs_hz[k] = static_cast<double>(line) / record_length_s;
    }
    std::sort(freqs_hz.begin(), freqs_hz.end());

    // Each component owns the band slice bounded by geometric midpoints; its
    // power equals the PSD integral over that slice.
    std::vector<SineComponent> comps(n_components);
    for (int k = 0; k < n_components; ++k) {
        const double e_lo = (k == 0) ? lo : std::sqrt(freqs_hz[k - 1] * freqs_hz[k]);
        const double e_hi =
            (k == n_components - 1) ? hi : std::sqrt(freqs_hz[k] * freqs_hz[k + 1]);
        const double power = psd_integral(target_psd, std::max(lo, e_lo), std::min(hi, e_hi));
        comps[k].amplitude = std::sqrt(2.0 * power);
        comps[k].freq_rad_s = freqs_hz[k] * kTwoPi;
        comps[k].phase_rad = 0.0;
    }
    return MultisineSpec(std::move(comps));
}

MultisineSpec scaled_to_rms(const MultisineSpec& spec, double target_rms) {
    if (!(target_rms > 0.0)) throw ValidationError("target RMS must be positive");
    const double current = spec.analytic_rms();
    if (current == 0.0) throw ZeroSignal("cannot rescale a zero-amplitude spec");
    std::vector<SineComponent> comps = spec.components();
    for (auto& c : comps) c.amplitude *= target_rms / current;
    return MultisineSpec(std::move(comps));
}

std::vector<std::size_t> excitation_bins(const MultisineSpec& spec, double sample_rate,
                                         std::size_t n_samples) {
    if (spec.empty()) throw EmptySpec("multisine spec has no components");
    if (!(sample_rate > 0.0) || n_samples == 0)
        throw ValidationError("need a positive sample rate and a non-empty record");

    std::vector<std::size_t> bins;
    bins.reserve(spec.size());
    std::vector<double> freqs_hz;
    for (const auto& c : spec.components()) freqs_hz.push_back(c.freq_rad_s / kTwoPi);
    std::sort(freqs_hz.begin(), freqs_hz.end());

    for (double f : freqs_hz) {
        const double exact = f * static_cast<double>(n_samples) / sample_rate;
        const double rounded = std::round(exact);
        if (std::abs(exact - rounded) > 1e-9)
            throw NonCommensurate("frequency " + std::to_string(f) +
                                  " Hz does not complete integer periods (bin " +
                                  std::to_string(exact) + ")");
        if (rounded < 1.0)
            throw NonCommensurate("frequency " + std::to_string(f) +
                                  " Hz completes less than one period");
        const auto bin = static_cast<std::size_t>(rounded);
        if (2 * bin >= n_samples)
            throw NyquistViolation("excitation bin " + std::to_string(bin) +
                                   " is at or above Nyquist");
        if (!bins.empty() && bin <= bins.back())
            throw NonCommensurate("excitation bins are not strictly increasing");
        bins.push_back(bin);
    }
    return bins;
}

std::vector<PsdPoint> vehicle_psd_preset(std::string_view name) {
    // Band-limited qualitative shapes sampled on a log grid.
    double lo = 0.0, hi = 0.0;
    double (*shape)(double) = nullptr;
    if (name == "road") {
        // sustained lateral road inputs, rolling off past a few Hz
        lo = 0.5, hi = 8.0;
        shape = [](double f) { return 0.35 / (1.0 + std::pow(f / 2.5, 2.4)); };
    } else if (name == "air") {
        // vertical turbulence, broad mid-band content
        lo = 1.0, hi = 10.0;
        shape = [](double f) { return 0.55 / (1.0 + std::pow(f / 3.0, 2.0)); };
    } else if (name == "water") {
        // low-frequency wave-induced heave, peaked near 0.12 Hz
        lo = 0.05, hi = 0.5;
        shape = [](double f) {
            const double x = (f - 0.12) / 0.05;
            return 5.5 * std::exp(-0.5 * x * x) + 0.02;
        };
    } else {
        throw ValidationError("unknown vehicle PSD preset: " + std::string(name));
    }

    const int n = 41;
    std::vector<PsdPoint> psd(n);
    for (int i = 0; i < n; ++i) {
        const double f = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        psd[i] = {f, shape(f)};
    }
    return psd;
}

}  // namespace bdft
