// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bdft/cancellation.hpp"
#include "bdft/identification.hpp"
#include "bdft/rng.hpp"
#include "oracles.hpp"

using namespace bdft;

namespace {

SyntheticParticipant participant_with(const BdftParams& y, const BdftParams& z,
                                      double remnant = 0.0, std::uint64_t seed = 1) {
    SyntheticParticipant p;
    p.bdft_y = y;
    p.bdft_z = z;
    p.tracking_bandwidth = 4.0;
    p.remnant_level = remnant;
    p.rng_seed = seed;
    return p;
}

MultisineSpec test_design(double rms = 2.0) {
    std::vector<SineComponent> comps;
    for (int line : {10, 14, 19, 27, 38, 54, 76, 108})
        comps.push_back({1.0, kTwoPi * line / 20.0, 0.7 * line});
    return scaled_to_rms(MultisineSpec(comps), rms);
}

Trial discretized_trial(const SyntheticParticipant& p, double fs = 100.0,
                        double duration = 20.0, std::uint64_t ref_seed = 4) {
    TrialOptions opt;
    opt.synthesis = BdftSynthesis::kDiscretized;
    const auto ref = make_reference(ReferenceKind::kLissajous, duration, fs, ref_seed);
    return run_trial(p, ref, test_design(), fs, duration, opt);
}

}  // namespace

TEST_CASE("truth-parameter cancellation inverts the construction") {
    const BdftParams truth_y{2.5, 12.0, 0.35};
    const BdftParams truth_z{3.2, 9.0, 0.30};
    const Trial trial = discretized_trial(participant_with(truth_y, truth_z));
    const auto [ucan_y, ucan_z] = cancel_batch(trial, truth_y, truth_z);
    for (std::size_t i = 0; i < ucan_y.size(); ++i) {
        CHECK(ucan_y.samples[i] ==
              doctest::Approx(trial.voluntary_y->samples[i]).epsilon(1e-6));
        CHECK(ucan_z.samples[i] ==
              doctest::Approx(trial.voluntary_z->samples[i]).epsilon(1e-6));
    }
}

TEST_CASE("a zero-gain model cancels nothing") {
    const Trial trial = discretized_trial(participant_with({2.5, 12.0, 0.35}, {3.2, 9.0, 0.3}));
    const BdftParams zero_gain{0.0, 12.0, 0.35};
    const auto [ucan_y, ucan_z] = cancel_batch(trial, zero_gain, zero_gain);
    for (std::size_t i = 0; i < ucan_y.size(); ++i) {
        CHECK(ucan_y.samples[i] == trial.recorded_y.samples[i]);
        CHECK(ucan_z.samples[i] == trial.recorded_z.samples[i]);
    }
}

TEST_CASE("average-model cancellation sits between none and individual") {
    const SyntheticParticipant base = participant_with({2.5, 12.0, 0.35}, {3.2, 9.0, 0.3});
    const auto population = make_population(6, 0.2, base, 55);
    const SyntheticParticipant subject = population[2];
    const Trial trial = discretized_trial(subject);

    const auto [none_y, none_z] = std::pair{trial.recorded_y, trial.recorded_z};
    const auto [avg_y, avg_z] = cancel_batch(trial, base.bdft_y, base.bdft_z);
    const auto [ind_y, ind_z] = cancel_batch(trial, subject.bdft_y, subject.bdft_z);

    const double vaf_none = vaf(*trial.voluntary_y, none_y);
    const double vaf_avg = vaf(*trial.voluntary_y, avg_y);
    const double vaf_ind = vaf(*trial.voluntary_y, ind_y);
    CHECK(vaf_avg > vaf_none);
    CHECK(vaf_ind > vaf_avg);
}

TEST_CASE("push on a zero stream returns zeros") {
    Canceller c({2.0, 10.0, 0.4}, 100.0);
    for (int i = 0; i < 100; ++i) CHECK(c.push(0.0, 0.0) == 0.0);
}

TEST_CASE("streaming outputs bit-match the batch path") {
    const BdftParams py{2.5, 12.0, 0.35};
    const BdftParams pz{3.2, 9.0, 0.30};
    const Trial trial = discretized_trial(participant_with(py, pz, /*remnant=*/0.7, 9));
    const auto [batch_y, batch_z] = cancel_batch(trial, py, pz);

    Canceller cy(py, trial.recorded_y.sample_rate);
    Canceller cz(pz, trial.recorded_z.sample_rate);
    for (std::size_t i = 0; i < trial.recorded_y.size(); ++i) {
        const double sy = cy.push(trial.perturbation_y.samples[i], trial.recorded_y.samples[i]);
        const double sz = cz.push(trial.perturbation_z.samples[i], trial.recorded_z.samples[i]);
        CHECK(sy == batch_y.samples[i]);
        CHECK(sz == batch_z.samples[i]);
    }
}

TEST_CASE("reset then replay reproduces the stream") {
    const MultisineSpec spec = test_design();
    const TimeSeries fd = generate_multisine(spec, 100.0, 20.0);
    Canceller c({2.2, 11.0, 0.4}, 100.0);
    std::vector<double> first;
    for (double v : fd.samples) first.push_back(c.push(v, 0.5 * v));
    c.reset();
    for (std::size_t i = 0; i < fd.samples.size(); ++i)
        CHECK(c.push(fd.samples[i], 0.5 * fd.samples[i]) == first[i]);
}

TEST_CASE("perfect-model completeness at the excitation bins") {
    const BdftParams truth_y{2.5, 12.0, 0.35};
    const BdftParams truth_z{3.2, 9.0, 0.30};
    const Trial trial =
        discretized_trial(participant_with(truth_y, truth_z), 100.0, 40.0);
    const auto [ucan_y, ucan_z] = cancel_batch(trial, truth_y, truth_z);

    // keep integer periods after the transient: drop the first fundamental
    // period (20 s covers 5 time constants comfortably)
    const std::size_t skip = 2000, window = 2000;
    auto cut = [&](const TimeSeries& ts) {
        return std::vector<double>(ts.samples.begin() + skip,
                                   ts.samples.begin() + skip + window);
    };
    const auto rec = cut(trial.recorded_y);
    const auto can = cut(ucan_y);
    const auto vol = cut(*trial.voluntary_y);
    const auto bins = excitation_bins(test_design(), 100.0, window);
    for (std::size_t bin : bins) {
        const double before = std::norm(oracles::naive_dft_bin(rec, bin));
        const double after = std::norm(oracles::naive_dft_bin(can, bin));
        CHECK(after <= 1e-8 * before);
    }
    // voluntary content is untouched: compare at the reference lines
    for (std::size_t bin = 1; bin <= 12; ++bin) {
        const double vol_power = std::norm(oracles::naive_dft_bin(vol, bin));
        if (vol_power < 1.0) continue;  // only the actual reference lines
        const double before = std::norm(oracles::naive_dft_bin(rec, bin));
        const double after = std::norm(oracles::naive_dft_bin(can, bin));
        CHECK(after == doctest::Approx(before).epsilon(1e-9));
    }
}

TEST_CASE("retuning with identical parameters leaves the stream unchanged") {
    const BdftParams p{2.0, 10.0, 0.4};
    const LpvSchedule s = make_lpv_schedule(p, {}, "rms", 1.0, 0.0, 2.0);
    const TimeSeries fd = generate_multisine(test_design(), 100.0, 20.0);

    Canceller plain(p, 100.0);
    Canceller retuned(p, 100.0);
    for (std::size_t i = 0; i < fd.samples.size(); ++i) {
        if (i == 500) retuned = update_params(retuned, s, 1.7);  // same params via schedule
        CHECK(retuned.push(fd.samples[i], 0.0) == plain.push(fd.samples[i], 0.0));
    }
}

TEST_CASE("retuning mid-stream settles onto the new model") {
    const BdftParams a{2.0, 10.0, 0.4};
    const BdftParams b{3.0, 14.0, 0.5};
    const LpvSchedule s = fit_lpv_schedule({{1.0, a}, {2.0, b}});
    const TimeSeries fd = generate_multisine(test_design(), 100.0, 40.0);

    Canceller swapped(a, 100.0);
    Canceller fresh(b, 100.0);
    const std::size_t swap_at = 1000;
    // 5 time constants of the new model after the swap
    const auto settle =
        static_cast<std::size_t>(std::ceil(5.0 / (b.damping_ratio * b.natural_frequency) * 100.0));
    const double scale = peak_abs(fd.samples) * std::abs(b.gain);

    for (std::size_t i = 0; i < fd.samples.size(); ++i) {
        if (i == swap_at) swapped = update_params(swapped, s, 2.0);
        const double out_swapped = swapped.push(fd.samples[i], 0.0);
        const double out_fresh = fresh.push(fd.samples[i], 0.0);
        if (i >= swap_at + settle)
            CHECK(std::abs(out_swapped - out_fresh) <= 1e-3 * scale);
    }
}

TEST_CASE("update_params rejects out-of-range scheduling values") {
    const BdftParams p{2.0, 10.0, 0.4};
    const LpvSchedule s = make_lpv_schedule(p, {}, "rms", 1.0, 0.5, 2.0);
    const Canceller c(p, 100.0);
    CHECK_THROWS_AS(update_params(c, s, 2.5), OutOfRange);
}

TEST_CASE("canceller construction rejects too-low sample rates") {
    CHECK_THROWS_AS(Canceller({1.0, 40.0, 0.5}, 10.0), SampleRateTooLow);
}
