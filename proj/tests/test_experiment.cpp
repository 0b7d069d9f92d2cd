// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "bdft/experiment.hpp"

using namespace bdft;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c = default_experiment_config();
    c.population_size = 4;
    c.duration_s = 20.0;
    c.perturbation.record_length_s = 20.0;
    c.perturbation.n_components = 6;
    c.perturbation.band_hi_hz = 6.0;
    c.perturbation.phase_trials = 10;
    return c;
}

}  // namespace

TEST_CASE("summary means recompute from the participant records") {
    const ExperimentResult result = run_experiment(small_config());
    REQUIRE(result.failures.empty());
    REQUIRE(result.participants.size() == 4);

    const ExperimentSummary recomputed = summarize(result.participants);
    CHECK(std::abs(recomputed.mean_vaf_individual - result.summary.mean_vaf_individual) <=
          1e-12);
    CHECK(std::abs(recomputed.mean_vaf_average - result.summary.mean_vaf_average) <= 1e-12);
    CHECK(std::abs(recomputed.mean_vaf_none - result.summary.mean_vaf_none) <= 1e-12);
    CHECK(recomputed.ordering_holds == result.summary.ordering_holds);

    // records arrive sorted by participant index
    for (std::size_t i = 1; i < result.participants.size(); ++i)
        CHECK(result.participants[i].index > result.participants[i - 1].index);
}

TEST_CASE("average model is the parameter-wise mean of the individual fits") {
    const ExperimentResult result = run_experiment(small_config());
    double mean_gain = 0.0;
    for (const auto& p : result.participants) mean_gain += p.y.fitted.gain;
    mean_gain /= static_cast<double>(result.participants.size());
    CHECK(result.average_y.gain == doctest::Approx(mean_gain).epsilon(1e-12));
}

TEST_CASE("config parsing reports field paths") {
    auto parse = [](const std::string& text) { return experiment_config_from_json(text); };

    CHECK_THROWS_AS(parse("not json"), ValidationError);
    try {
        parse(R"({"population": {"size": 0}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("population.size") != std::string::npos);
    }
    try {
        parse(R"({"perturbation": {"band_hz": [2.0]}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("perturbation.band_hz") != std::string::npos);
    }
    try {
        parse(R"({"population": {"base": {"bdft_y": {"gain": 1.0}}}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("population.base.bdft_y") != std::string::npos);
    }
    CHECK_THROWS_AS(parse(R"({"perturbation": {"spec_json": "/no/such/file.json"}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse(R"({"plot_participant": 99})"), ValidationError);
}

TEST_CASE("seed override replaces every seed") {
    const ExperimentConfig a = experiment_config_from_json("{}", 42);
    CHECK(a.population_seed == 42);
    CHECK(a.reference_seed == 43);
    CHECK(a.perturbation.phase_seed == 44);
}

TEST_CASE("a degenerate population scores individual and average models identically") {
    ExperimentConfig c = small_config();
    c.population_spread = 0.0;
    c.base.remnant_level = 0.0;
    const ExperimentResult result = run_experiment(c);
    REQUIRE(result.failures.empty());
    for (const auto& p : result.participants) {
        CHECK(std::abs(p.y.vaf_individual - p.y.vaf_average) <= 1e-6);
        CHECK(std::abs(p.z.vaf_individual - p.z.vaf_average) <= 1e-6);
    }
}

TEST_CASE("per-participant failures are collected, not fatal") {
    ExperimentConfig c = small_config();
    // natural frequencies this close to pi * fs make some draws undiscretizable
    c.base.bdft_y.natural_frequency = 310.0;
    c.population_spread = 0.3;
    c.population_seed = 12;
    const ExperimentResult result = run_experiment(c);
    CHECK(!result.failures.empty());
    CHECK(result.participants.size() + result.failures.size() >= 4);
    CHECK(result.summary.participants == static_cast<int>(result.participants.size()));
}

TEST_CASE("build_perturbation_spec resolves presets and explicit specs") {
    PerturbationConfig pc;
    pc.psd_preset = "water";
    pc.n_components = 5;
    pc.band_lo_hz = 0.05;
    pc.band_hi_hz = 0.5;
    pc.record_length_s = 120.0;
    pc.target_rms = 1.0;
    pc.phase_trials = 5;
    const MultisineSpec spec = build_perturbation_spec(pc);
    CHECK(spec.size() == 5);
    CHECK(spec.analytic_rms() == doctest::Approx(1.0));

    PerturbationConfig explicit_pc;
    explicit_pc.spec = MultisineSpec({{1.0, 2.0, 0.5}});
    const MultisineSpec passthrough = build_perturbation_spec(explicit_pc);
    CHECK(passthrough.size() == 1);
    CHECK(passthrough.components()[0].phase_rad == 0.5);  // no re-randomization
}
