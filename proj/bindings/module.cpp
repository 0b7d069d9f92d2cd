// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bdft/cancellation.hpp"
#include "bdft/experiment.hpp"
#include "bdft/identification.hpp"
#include "bdft/io.hpp"
#include "bdft/multisine.hpp"
#include "bdft/simulator.hpp"

namespace py = pybind11;
using namespace bdft;

PYBIND11_MODULE(_core, m) {
    m.doc() = "biodynamic feedthrough identification and cancellation toolkit";

    // translators run newest-first: register the base before the derived
    py::register_exception<Error>(m, "ToolkitError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    // --- signals ---------------------------------------------------------
    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init<>())
        .def(py::init([](std::vector<double> samples, double sample_rate) {
                 return TimeSeries{std::move(samples), sample_rate};
             }),
             py::arg("samples"), py::arg("sample_rate"))
        .def_readwrite("samples", &TimeSeries::samples)
        .def_readwrite("sample_rate", &TimeSeries::sample_rate)
        .def("__len__", &TimeSeries::size)
        .def("duration", &TimeSeries::duration);

    m.def("rms", [](const TimeSeries& ts) { return rms(ts); });
    m.def("variance", [](const TimeSeries& ts) { return variance(ts); });

    py::class_<SineComponent>(m, "SineComponent")
        .def(py::init([](double a, double w, double p) {
                 return SineComponent{a, w, p};
             }),
             py::arg("amplitude"), py::arg("freq_rad_s"), py::arg("phase_rad") = 0.0)
        .def_readwrite("amplitude", &SineComponent::amplitude)
        .def_readwrite("freq_rad_s", &SineComponent::freq_rad_s)
        .def_readwrite("phase_rad", &SineComponent::phase_rad);

    py::class_<MultisineSpec>(m, "MultisineSpec")
        .def(py::init<std::vector<SineComponent>>(), py::arg("components"))
        .def_property_readonly("components", &MultisineSpec::components)
        .def("__len__", &MultisineSpec::size)
        .def("analytic_rms", &MultisineSpec::analytic_rms);

    py::class_<PsdPoint>(m, "PsdPoint")
        .def(py::init([](double f, double p) {
                 return PsdPoint{f, p};
             }),
             py::arg("freq_hz"), py::arg("psd"))
        .def_readwrite("freq_hz", &PsdPoint::freq_hz)
        .def_readwrite("psd", &PsdPoint::psd);

    m.def("generate_multisine", &generate_multisine, py::arg("spec"), py::arg("sample_rate"),
          py::arg("duration"));
    m.def("crest_factor", &crest_factor, py::arg("series"));
    m.def("design_crest_factor", &design_crest_factor, py::arg("spec"));
    m.def("randomize_phases", &randomize_phases, py::arg("spec"), py::arg("seed"),
          py::arg("trials") = 100);
    m.def("fit_multisine_to_psd", &fit_multisine_to_psd, py::arg("target_psd"),
          py::arg("n_components"), py::arg("band_hz"), py::arg("record_length_s") = 60.0);
    m.def("scaled_to_rms", &scaled_to_rms, py::arg("spec"), py::arg("target_rms"));
    m.def("excitation_bins", &excitation_bins, py::arg("spec"), py::arg("sample_rate"),
          py::arg("n_samples"));
    m.def("vehicle_psd_preset", &vehicle_psd_preset, py::arg("name"));

    // --- model -----------------------------------------------------------
    py::class_<BdftParams>(m, "BdftParams")
        .def(py::init([](double g, double wn, double z) {
                 return BdftParams{g, wn, z};
             }),
             py::arg("gain"), py::arg("natural_frequency"), py::arg("damping_ratio"))
        .def_readwrite("gain", &BdftParams::gain)
        .def_readwrite("natural_frequency", &BdftParams::natural_frequency)
        .def_readwrite("damping_ratio", &BdftParams::damping_ratio)
        .def("__repr__", [](const BdftParams& p) {
            return "BdftParams(gain=" + std::to_string(p.gain) +
                   ", natural_frequency=" + std::to_string(p.natural_frequency) +
                   ", damping_ratio=" + std::to_string(p.damping_ratio) + ")";
        });

    py::class_<FrfPoint>(m, "FrfPoint")
        .def(py::init([](double omega, std::complex<double> value, double weight) {
                 return FrfPoint{omega, value, weight};
             }),
             py::arg("omega"), py::arg("value"), py::arg("weight") = 1.0)
        .def_readwrite("omega", &FrfPoint::omega)
        .def_readwrite("value", &FrfPoint::value)
        .def_readwrite("weight", &FrfPoint::weight);

    py::class_<FrequencyResponse>(m, "FrequencyResponse")
        .def(py::init<>())
        .def_readwrite("points", &FrequencyResponse::points)
        .def("__len__", [](const FrequencyResponse& f) { return f.points.size(); });

    m.def("frf_value", &frf_value, py::arg("params"), py::arg("omega"));
    m.def("evaluate_frf", &evaluate_frf, py::arg("params"), py::arg("omegas"));
    m.def("simulate_response", &simulate_response, py::arg("params"), py::arg("input"),
          py::arg("prewarp") = false);
    m.def("settling_time", &settling_time, py::arg("params"), py::arg("n_time_constants") = 5.0);
    m.def("discard_transient", &discard_transient, py::arg("series"), py::arg("params"),
          py::arg("n_time_constants") = 5.0);

    py::class_<LpvSensitivities>(m, "LpvSensitivities")
        .def(py::init([](double g, double wn, double z) {
                 return LpvSensitivities{g, wn, z};
             }),
             py::arg("gain") = 0.0, py::arg("natural_frequency") = 0.0,
             py::arg("damping_ratio") = 0.0)
        .def_readwrite("gain", &LpvSensitivities::gain)
        .def_readwrite("natural_frequency", &LpvSensitivities::natural_frequency)
        .def_readwrite("damping_ratio", &LpvSensitivities::damping_ratio);

    py::class_<LpvSchedule>(m, "LpvSchedule")
        .def_readwrite("base", &LpvSchedule::base)
        .def_readwrite("sensitivities", &LpvSchedule::sensitivities)
        .def_readwrite("variable_name", &LpvSchedule::variable_name)
        .def_readwrite("reference_value", &LpvSchedule::reference_value)
        .def_readwrite("range_min", &LpvSchedule::range_min)
        .def_readwrite("range_max", &LpvSchedule::range_max);

    m.def("make_lpv_schedule", &make_lpv_schedule, py::arg("base"), py::arg("sensitivities"),
          py::arg("variable_name"), py::arg("reference_value"), py::arg("range_min"),
          py::arg("range_max"));
    m.def("evaluate_schedule", &evaluate_schedule, py::arg("schedule"), py::arg("variable_value"));

    // --- simulator ---------------------------------------------------------
    py::class_<SyntheticParticipant>(m, "SyntheticParticipant")
        .def(py::init<>())
        .def_readwrite("bdft_y", &SyntheticParticipant::bdft_y)
        .def_readwrite("bdft_z", &SyntheticParticipant::bdft_z)
        .def_readwrite("tracking_bandwidth", &SyntheticParticipant::tracking_bandwidth)
        .def_readwrite("remnant_level", &SyntheticParticipant::remnant_level)
        .def_readwrite("rng_seed", &SyntheticParticipant::rng_seed);

    py::enum_<ReferenceKind>(m, "ReferenceKind")
        .value("FIXED_POINT", ReferenceKind::kFixedPoint)
        .value("LISSAJOUS", ReferenceKind::kLissajous)
        .value("RAMP_HOLD", ReferenceKind::kRampHold);

    py::class_<ReferenceOptions>(m, "ReferenceOptions")
        .def(py::init<>())
        .def_readwrite("center_y", &ReferenceOptions::center_y)
        .def_readwrite("center_z", &ReferenceOptions::center_z)
        .def_readwrite("amp_y", &ReferenceOptions::amp_y)
        .def_readwrite("amp_z", &ReferenceOptions::amp_z);

    py::class_<ReferenceTrajectory>(m, "ReferenceTrajectory")
        .def_readwrite("y", &ReferenceTrajectory::y)
        .def_readwrite("z", &ReferenceTrajectory::z)
        .def_readwrite("periodic", &ReferenceTrajectory::periodic)
        .def_readwrite("line_freqs_hz", &ReferenceTrajectory::line_freqs_hz);

    m.def("make_reference", &make_reference, py::arg("kind"), py::arg("duration"),
          py::arg("sample_rate"), py::arg("seed"), py::arg("options") = ReferenceOptions{});

    py::enum_<BdftSynthesis>(m, "BdftSynthesis")
        .value("ANALYTIC", BdftSynthesis::kAnalytic)
        .value("DISCRETIZED", BdftSynthesis::kDiscretized);

    py::class_<TrialOptions>(m, "TrialOptions")
        .def(py::init<>())
        .def_readwrite("synthesis", &TrialOptions::synthesis)
        .def_readwrite("enforce_spectral_separation",
                       &TrialOptions::enforce_spectral_separation);

    py::class_<Trial>(m, "Trial")
        .def(py::init<>())
        .def_readwrite("perturbation_y", &Trial::perturbation_y)
        .def_readwrite("perturbation_z", &Trial::perturbation_z)
        .def_readwrite("recorded_y", &Trial::recorded_y)
        .def_readwrite("recorded_z", &Trial::recorded_z)
        .def_readwrite("reference_y", &Trial::reference_y)
        .def_readwrite("reference_z", &Trial::reference_z)
        .def_readwrite("voluntary_y", &Trial::voluntary_y)
        .def_readwrite("voluntary_z", &Trial::voluntary_z)
        .def_readwrite("truth_bdft_y", &Trial::truth_bdft_y)
        .def_readwrite("truth_bdft_z", &Trial::truth_bdft_z)
        .def_readwrite("offscreen_samples", &Trial::offscreen_samples);

    m.def("run_trial", &run_trial, py::arg("participant"), py::arg("reference"),
          py::arg("perturbation_spec"), py::arg("sample_rate"), py::arg("duration"),
          py::arg("options") = TrialOptions{});
    m.def("make_population", &make_population, py::arg("n"), py::arg("spread"), py::arg("base"),
          py::arg("seed"));

    // --- identification -----------------------------------------------------
    py::class_<FitResult>(m, "FitResult")
        .def_readwrite("params", &FitResult::params)
        .def_readwrite("residual", &FitResult::residual)
        .def_readwrite("iterations", &FitResult::iterations)
        .def_readwrite("converged", &FitResult::converged)
        .def_readwrite("cost_history", &FitResult::cost_history);

    m.def("estimate_frf", &estimate_frf, py::arg("perturbation"), py::arg("response"),
          py::arg("spec"));
    m.def("fit_bdft_model", &fit_bdft_model, py::arg("frf"),
          py::arg("init") = std::optional<BdftParams>{});
    m.def("vaf", &vaf, py::arg("measured"), py::arg("predicted"));
    m.def("fit_lpv_schedule", &fit_lpv_schedule, py::arg("per_condition_fits"),
          py::arg("variable_name") = "perturbation_rms");

    // --- cancellation ---------------------------------------------------------
    py::class_<Canceller>(m, "Canceller")
        .def(py::init<const BdftParams&, double, bool>(), py::arg("params"),
             py::arg("sample_rate"), py::arg("prewarp") = false)
        .def("push", &Canceller::push, py::arg("fd_sample"), py::arg("u_sample"))
        .def("reset", &Canceller::reset)
        .def("retuned", &Canceller::retuned, py::arg("params"))
        .def_property_readonly("params", &Canceller::params)
        .def_property_readonly("sample_rate", &Canceller::sample_rate);

    m.def("update_params", &update_params, py::arg("state"), py::arg("schedule"),
          py::arg("variable_value"));
    m.def("cancel_batch", &cancel_batch, py::arg("trial"), py::arg("params_y"),
          py::arg("params_z"), py::arg("prewarp") = false);

    // --- experiment -----------------------------------------------------------
    py::class_<ExperimentSummary>(m, "ExperimentSummary")
        .def_readwrite("mean_vaf_individual", &ExperimentSummary::mean_vaf_individual)
        .def_readwrite("mean_vaf_average", &ExperimentSummary::mean_vaf_average)
        .def_readwrite("mean_vaf_none", &ExperimentSummary::mean_vaf_none)
        .def_readwrite("mean_vaf_gap", &ExperimentSummary::mean_vaf_gap)
        .def_readwrite("ordering_holds", &ExperimentSummary::ordering_holds)
        .def_readwrite("participants", &ExperimentSummary::participants);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("population_size", &ExperimentConfig::population_size)
        .def_readwrite("population_spread", &ExperimentConfig::population_spread)
        .def_readwrite("population_seed", &ExperimentConfig::population_seed)
        .def_readwrite("base", &ExperimentConfig::base)
        .def_readwrite("reference_seed", &ExperimentConfig::reference_seed)
        .def_readwrite("duration_s", &ExperimentConfig::duration_s)
        .def_readwrite("sample_rate_hz", &ExperimentConfig::sample_rate_hz);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readwrite("summary", &ExperimentResult::summary)
        .def_property_readonly("n_participants", [](const ExperimentResult& r) {
            return r.participants.size();
        });

    m.def("default_experiment_config", &default_experiment_config);
    m.def("experiment_config_from_json",
          [](const std::string& text) { return experiment_config_from_json(text); },
          py::arg("text"));
    m.def("run_experiment", &run_experiment, py::arg("config"));
    m.def("experiment_result_to_json",
          [](const ExperimentResult& r) { return to_json(r); });
    m.def("write_experiment_outputs", &write_experiment_outputs, py::arg("result"),
          py::arg("out_dir"));

    // --- serialization ----------------------------------------------------------
    m.def("spec_to_json", [](const MultisineSpec& s) { return io::to_json(s); });
    m.def("spec_from_json", &io::multisine_spec_from_json);
    m.def("params_to_json", [](const BdftParams& p) { return io::to_json(p); });
    m.def("params_from_json", &io::bdft_params_from_json);
}
