// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bdft/simulator.hpp"
#include "bdft/rng.hpp"
#include "oracles.hpp"

using namespace bdft;

namespace {

SyntheticParticipant quiet_participant() {
    SyntheticParticipant p;
    p.bdft_y = {2.5, 12.0, 0.35};
    p.bdft_z = {3.2, 9.0, 0.30};
    p.tracking_bandwidth = 4.0;
    p.remnant_level = 0.0;
    p.rng_seed = 17;
    return p;
}

MultisineSpec small_design() {
    // 5 lines commensurate with a 20 s record
    std::vector<SineComponent> comps;
    for (int line : {12, 17, 25, 38, 55})
        comps.push_back({0.5, kTwoPi * line / 20.0, 0.4 * line});
    return MultisineSpec(comps);
}

}  // namespace

TEST_CASE("fixed-point reference is constant, in the box, and seed-deterministic") {
    const auto a = make_reference(ReferenceKind::kFixedPoint, 10.0, 100.0, 5);
    const auto b = make_reference(ReferenceKind::kFixedPoint, 10.0, 100.0, 5);
    const auto c = make_reference(ReferenceKind::kFixedPoint, 10.0, 100.0, 6);
    CHECK(a.periodic);
    for (double v : a.y.samples) CHECK(v == a.y.samples[0]);
    for (double v : a.z.samples) CHECK(v == a.z.samples[0]);
    CHECK(a.y.samples[0] == b.y.samples[0]);
    CHECK(a.y.samples[0] != c.y.samples[0]);
    CHECK(a.y.samples[0] > 0.0);
    CHECK(a.y.samples[0] < kScreenWidthMm);
    CHECK(a.z.samples[0] > 0.0);
    CHECK(a.z.samples[0] < kScreenHeightMm);
}

TEST_CASE("lissajous reference reaches its amplitude") {
    ReferenceOptions opt;
    opt.center_y = 0.0;
    opt.center_z = 0.0;
    opt.amp_y = 1.0;
    opt.amp_z = 1.0;
    const auto ref = make_reference(ReferenceKind::kLissajous, 60.0, 1000.0, 9, opt);
    CHECK(peak_abs(ref.y.samples) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ref.periodic);
    REQUIRE(ref.line_freqs_hz.size() == 2);
    CHECK(ref.line_freqs_hz[0] != ref.line_freqs_hz[1]);
}

TEST_CASE("ramp-hold interpolates its knot schedule") {
    const double duration = 60.0, fs = 100.0;
    const auto ref = make_reference(ReferenceKind::kRampHold, duration, fs, 21);
    const auto knots = ramp_hold_knots(duration, 21);
    REQUIRE(knots.size() == 6);
    CHECK_FALSE(ref.periodic);

    // direct evaluation of the segment schedule at knots and ramp midpoints
    auto interp = [&](double t) {
        std::size_t seg = 0;
        while (seg + 2 < knots.size() && t > knots[seg + 1].t) ++seg;
        const double a = (t - knots[seg].t) / (knots[seg + 1].t - knots[seg].t);
        return std::pair{knots[seg].y + a * (knots[seg + 1].y - knots[seg].y),
                         knots[seg].z + a * (knots[seg + 1].z - knots[seg].z)};
    };
    for (double t : {0.0, 10.0, 15.0, 20.0, 30.0, 35.0, 40.0, 50.0, 59.99}) {
        const auto idx = static_cast<std::size_t>(std::llround(t * fs));
        const auto [ey, ez] = interp(static_cast<double>(idx) / fs);
        CHECK(ref.y.samples[idx] == doctest::Approx(ey).epsilon(1e-12));
        CHECK(ref.z.samples[idx] == doctest::Approx(ez).epsilon(1e-12));
    }
    // knot positions are held during holds
    CHECK(ref.y.samples[500] == knots[0].y);   // t = 5 s, first hold
    CHECK(ref.y.samples[2500] == knots[2].y);  // t = 25 s, second hold
}

TEST_CASE("run_trial with no perturbation power and no remnant reproduces the reference") {
    SyntheticParticipant p = quiet_participant();
    const MultisineSpec zero_spec({{0.0, kTwoPi * 12.0 / 20.0, 0.0}});
    const auto ref = make_reference(ReferenceKind::kFixedPoint, 20.0, 100.0, 3);
    const Trial trial = run_trial(p, ref, zero_spec, 100.0, 20.0);
    for (std::size_t i = 0; i < trial.recorded_y.size(); ++i) {
        CHECK(trial.recorded_y.samples[i] ==
              doctest::Approx(ref.y.samples[i]).epsilon(1e-6));
        CHECK(trial.recorded_z.samples[i] ==
              doctest::Approx(ref.z.samples[i]).epsilon(1e-6));
    }
}

TEST_CASE("run_trial construction identity: recorded - voluntary = truth when remnant is zero") {
    const auto ref = make_reference(ReferenceKind::kLissajous, 20.0, 100.0, 3);
    const Trial trial = run_trial(quiet_participant(), ref, small_design(), 100.0, 20.0);
    REQUIRE(trial.voluntary_y.has_value());
    REQUIRE(trial.truth_bdft_y.has_value());
    for (std::size_t i = 0; i < trial.recorded_y.size(); ++i) {
        CHECK(std::abs(trial.recorded_y.samples[i] - trial.voluntary_y->samples[i] -
                       trial.truth_bdft_y->samples[i]) <= 1e-9);
        CHECK(std::abs(trial.recorded_z.samples[i] - trial.voluntary_z->samples[i] -
                       trial.truth_bdft_z->samples[i]) <= 1e-9);
    }
}

TEST_CASE("single-sine truth amplitude matches the analytic FRF") {
    SyntheticParticipant p = quiet_participant();
    const double omega = kTwoPi * 1.5;  // 30 periods in 20 s
    const MultisineSpec spec({{1.0, omega, 0.0}});
    const auto ref = make_reference(ReferenceKind::kFixedPoint, 20.0, 100.0, 3);
    const Trial trial = run_trial(p, ref, spec, 100.0, 20.0);

    const auto [amp, phase] =
        oracles::sine_amplitude_phase(trial.truth_bdft_y->samples, 100.0, omega);
    CHECK(amp == doctest::Approx(std::abs(frf_value(p.bdft_y, omega))).epsilon(1e-3));
}

TEST_CASE("recorded power at excitation bins is attributable to the feedthrough") {
    const auto ref = make_reference(ReferenceKind::kLissajous, 20.0, 100.0, 3);
    const Trial trial = run_trial(quiet_participant(), ref, small_design(), 100.0, 20.0);
    const auto bins = excitation_bins(small_design(), 100.0, trial.recorded_y.size());
    for (std::size_t bin : bins) {
        const auto rec = oracles::naive_dft_bin(trial.recorded_y.samples, bin);
        const auto truth = oracles::naive_dft_bin(trial.truth_bdft_y->samples, bin);
        CHECK(std::abs(rec - truth) <= 1e-9 * std::abs(truth));
    }
}

TEST_CASE("trials are deterministic given seeds") {
    SyntheticParticipant p = quiet_participant();
    p.remnant_level = 0.8;
    const auto ref = make_reference(ReferenceKind::kLissajous, 20.0, 100.0, 3);
    const Trial a = run_trial(p, ref, small_design(), 100.0, 20.0);
    const Trial b = run_trial(p, ref, small_design(), 100.0, 20.0);
    REQUIRE(a.recorded_y.size() == b.recorded_y.size());
    for (std::size_t i = 0; i < a.recorded_y.size(); ++i) {
        CHECK(a.recorded_y.samples[i] == b.recorded_y.samples[i]);
        CHECK(a.recorded_z.samples[i] == b.recorded_z.samples[i]);
    }
}

TEST_CASE("discretized synthesis uses the bilinear filter path") {
    SyntheticParticipant p = quiet_participant();
    TrialOptions opt;
    opt.synthesis = BdftSynthesis::kDiscretized;
    const auto ref = make_reference(ReferenceKind::kFixedPoint, 20.0, 100.0, 3);
    const Trial trial = run_trial(p, ref, small_design(), 100.0, 20.0, opt);
    const TimeSeries expected = simulate_response(p.bdft_y, trial.perturbation_y);
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(trial.truth_bdft_y->samples[i] == expected.samples[i]);
}

TEST_CASE("ramp-hold references overlap the excitation lines and are rejected") {
    const auto ref = make_reference(ReferenceKind::kRampHold, 20.0, 100.0, 21);
    CHECK_THROWS_AS(run_trial(quiet_participant(), ref, small_design(), 100.0, 20.0),
                    SpectralOverlap);
    TrialOptions opt;
    opt.enforce_spectral_separation = false;
    const Trial trial = run_trial(quiet_participant(), ref, small_design(), 100.0, 20.0, opt);
    CHECK(trial.recorded_y.size() == 2000);
}

TEST_CASE("non-commensurate durations are rejected") {
    const auto ref = make_reference(ReferenceKind::kFixedPoint, 19.5, 100.0, 3);
    CHECK_THROWS_AS(run_trial(quiet_participant(), ref, small_design(), 100.0, 19.5),
                    NonCommensurate);
}

TEST_CASE("population with zero spread copies the base") {
    const auto pop = make_population(5, 0.0, quiet_participant(), 13);
    REQUIRE(pop.size() == 5);
    for (const auto& p : pop) {
        CHECK(p.bdft_y.gain == quiet_participant().bdft_y.gain);
        CHECK(p.bdft_y.natural_frequency == quiet_participant().bdft_y.natural_frequency);
        CHECK(p.bdft_z.damping_ratio == quiet_participant().bdft_z.damping_ratio);
    }
    // remnant seeds still differ
    CHECK(pop[0].rng_seed != pop[1].rng_seed);
}

TEST_CASE("population draws are seed-deterministic") {
    const auto a = make_population(8, 0.3, quiet_participant(), 99);
    const auto b = make_population(8, 0.3, quiet_participant(), 99);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].bdft_y.gain == b[i].bdft_y.gain);
        CHECK(a[i].bdft_z.natural_frequency == b[i].bdft_z.natural_frequency);
        CHECK(a[i].rng_seed == b[i].rng_seed);
    }
}

TEST_CASE("population log-gain spread tracks the requested spread") {
    const auto base = quiet_participant();
    const auto pop = make_population(18, 0.2, base, 7);
    std::vector<double> log_gains;
    for (const auto& p : pop) log_gains.push_back(std::log(p.bdft_y.gain / base.bdft_y.gain));
    double m = 0.0;
    for (double v : log_gains) m += v;
    m /= static_cast<double>(log_gains.size());
    double s2 = 0.0;
    for (double v : log_gains) s2 += (v - m) * (v - m);
    const double sd = std::sqrt(s2 / (static_cast<double>(log_gains.size()) - 1.0));
    CHECK(sd > 0.2 * 0.7);
    CHECK(sd < 0.2 * 1.3);
}
