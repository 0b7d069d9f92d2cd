// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bdft/bdft_model.hpp"
#include "bdft/identification.hpp"
#include "bdft/multisine.hpp"
#include "bdft/simulator.hpp"

namespace bdft {

/// How the experiment's perturbation is specified: an explicit component
/// list, or a PSD (preset name or CSV file) to fit a multisine to.
struct PerturbationConfig {
    std::optional<MultisineSpec> spec;
    std::string psd_preset;            // "road", "air", "water"
    std::filesystem::path psd_csv;
    int n_components = 10;
    double band_lo_hz = 0.5;
    double band_hi_hz = 8.0;
    double record_length_s = 60.0;
    std::optional<double> target_rms;  // rescale after PSD fit
    int phase_trials = 100;            // crest-factor minimization draws
    std::uint64_t phase_seed = 1;
};

/// Full description of one identification/cancellation experiment. A config
/// file determines a run completely; there is no environment-dependent state.
struct ExperimentConfig {
    int population_size = 18;
    double population_spread = 0.2;
    std::uint64_t population_seed = 1;
    SyntheticParticipant base;
    PerturbationConfig perturbation;
    ReferenceKind reference_kind = ReferenceKind::kLissajous;
    ReferenceOptions reference_options;
    std::uint64_t reference_seed = 1;
    double duration_s = 60.0;
    double sample_rate_hz = 100.0;
    int plot_participant = 0;
};

/// Parses and eagerly validates a config document; error messages carry the
/// JSON field path. The optional seed override replaces every seed in the
/// config (CLI --seed).
ExperimentConfig experiment_config_from_json(const std::string& text,
                                             std::optional<std::uint64_t> seed_override = {});

/// Default desk-scale setup: 18 participants, 10 excitation frequencies on a
/// 60 s / 100 Hz record, road PSD preset. Parameter levels are illustrative
/// placeholders, not measured data.
ExperimentConfig default_experiment_config();

/// Per-axis outcome for one participant.
struct AxisResult {
    BdftParams fitted;
    FrequencyResponse frf;
    double fit_residual = 0.0;
    bool fit_converged = false;
    /// Recovery quality: VAF of the cancelled input against the voluntary
    /// component, for cancellation with the individual model, the population
    /// average model, and no cancellation at all.
    double vaf_individual = 0.0;
    double vaf_average = 0.0;
    double vaf_none = 0.0;
    /// Model quality: VAF of the model's predicted feedthrough against the
    /// measured feedthrough channel (recorded - voluntary).
    double model_vaf_individual = 0.0;
    double model_vaf_average = 0.0;
};

struct ParticipantResult {
    int index = 0;
    SyntheticParticipant truth;
    AxisResult y;
    AxisResult z;
};

struct ParticipantFailure {
    int index = 0;
    std::string error;
};

struct ExperimentSummary {
    double mean_vaf_individual = 0.0;  // mean over participants and axes
    double mean_vaf_average = 0.0;
    double mean_vaf_none = 0.0;
    double mean_vaf_gap = 0.0;         // individual - average
    int ordering_holds = 0;            // participants with individual >= average
    int participants = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    MultisineSpec spec;
    BdftParams average_y;
    BdftParams average_z;
    std::vector<ParticipantResult> participants;
    std::vector<ParticipantFailure> failures;
    ExperimentSummary summary;
};

/// Runs the full pipeline: population synthesis, per-participant trials, FRF
/// estimation, individual fits, population-average model, batch cancellation
/// with both models, VAF table. Per-participant failures are collected in the
/// result instead of aborting the run.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Resolves the perturbation config into a concrete multisine.
MultisineSpec build_perturbation_spec(const PerturbationConfig& config);

ExperimentSummary summarize(const std::vector<ParticipantResult>& participants);

std::string to_json(const ExperimentResult& result);
std::string to_csv_table(const ExperimentResult& result);

/// Writes result.json, table.csv, and bode.svg into out_dir.
void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& out_dir);

}  // namespace bdft
