// SPDX-License-Identifier: Apache-2.0
#include "bdft/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "bdft/cancellation.hpp"
#include "bdft/io.hpp"
#include "bdft/svg_plot.hpp"

namespace bdft {

using nlohmann::json;

namespace {

double field_double(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ValidationError(path + "." + key + ": missing");
    if (!j[key].is_number()) throw ValidationError(path + "." + key + ": must be a number");
    return j[key].get<double>();
}

double field_double_or(const json& j, const char* key, double fallback,
                       const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ValidationError(path + "." + key + ": must be a number");
    return j[key].get<double>();
}

int field_int_or(const json& j, const char* key, int fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ValidationError(path + "." + key + ": must be an integer");
    return j[key].get<int>();
}

std::uint64_t field_seed_or(const json& j, const char* key, std::uint64_t fallback,
                            const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned() && !j[key].is_number_integer())
        throw ValidationError(path + "." + key + ": must be an integer seed");
    return j[key].get<std::uint64_t>();
}

BdftParams params_from_field(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_object())
        throw ValidationError(path + "." + key + ": missing object");
    const std::string p = path + "." + key;
    BdftParams out{field_double(j[key], "gain", p),
                   field_double(j[key], "natural_frequency_rad_s", p),
                   field_double(j[key], "damping_ratio", p)};
    try {
        validate(out);
    } catch (const Error& e) {
        throw ValidationError(p + ": " + e.what());
    }
    return out;
}

}  // namespace

ExperimentConfig default_experiment_config() {
    ExperimentConfig c;
    c.population_size = 18;
    c.population_spread = 0.2;
    c.population_seed = 7;
    // Illustrative desk-scale participant; levels are placeholders, not
    // measured human data.
    c.base.bdft_y = {2.5, 12.0, 0.35};
    c.base.bdft_z = {3.2, 9.0, 0.30};
    c.base.tracking_bandwidth = 4.0;
    c.base.remnant_level = 0.6;
    c.base.rng_seed = 1;
    c.perturbation.psd_preset = "road";
    c.perturbation.n_components = 10;
    c.perturbation.band_lo_hz = 0.5;
    c.perturbation.band_hi_hz = 8.0;
    c.perturbation.record_length_s = 60.0;
    c.perturbation.target_rms = 2.0;
    c.perturbation.phase_trials = 100;
    c.perturbation.phase_seed = 3;
    c.reference_kind = ReferenceKind::kLissajous;
    c.reference_seed = 11;
    c.duration_s = 60.0;
    c.sample_rate_hz = 100.0;
    c.plot_participant = 0;
    return c;
}

ExperimentConfig experiment_config_from_json(const std::string& text,
                                             std::optional<std::uint64_t> seed_override) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("experiment config: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("experiment config: expected a JSON object");

    ExperimentConfig c = default_experiment_config();

    if (j.contains("population")) {
        const json& p = j["population"];
        if (!p.is_object()) throw ValidationError("population: must be an object");
        c.population_size = field_int_or(p, "size", c.population_size, "population");
        if (c.population_size < 1) throw ValidationError("population.size: must be >= 1");
        c.population_spread = field_double_or(p, "spread", c.population_spread, "population");
        if (c.population_spread < 0.0) throw ValidationError("population.spread: must be >= 0");
        c.population_seed = field_seed_or(p, "seed", c.population_seed, "population");
        if (p.contains("base")) {
            const json& b = p["base"];
            if (!b.is_object()) throw ValidationError("population.base: must be an object");
            c.base.bdft_y = params_from_field(b, "bdft_y", "population.base");
            c.base.bdft_z = params_from_field(b, "bdft_z", "population.base");
            c.base.tracking_bandwidth = field_double_or(
                b, "tracking_bandwidth_rad_s", c.base.tracking_bandwidth, "population.base");
            c.base.remnant_level =
                field_double_or(b, "remnant_level_mm", c.base.remnant_level, "population.base");
            try {
                validate(c.base);
            } catch (const Error& e) {
                throw ValidationError(std::string("population.base: ") + e.what());
            }
        }
    }

    if (j.contains("perturbation")) {
        const json& p = j["perturbation"];
        if (!p.is_object()) throw ValidationError("perturbation: must be an object");
        PerturbationConfig& pc = c.perturbation;
        if (p.contains("spec")) {
            pc.spec = io::multisine_spec_from_json(p["spec"].dump());
            pc.psd_preset.clear();
        } else if (p.contains("spec_json")) {
            const std::filesystem::path path = p["spec_json"].get<std::string>();
            if (!std::filesystem::exists(path))
                throw ValidationError("perturbation.spec_json: file not found: " + path.string());
            pc.spec = io::multisine_spec_from_json(io::read_text_file(path));
            pc.psd_preset.clear();
        } else if (p.contains("psd_csv")) {
            pc.psd_csv = p["psd_csv"].get<std::string>();
            if (!std::filesystem::exists(pc.psd_csv))
                throw ValidationError("perturbation.psd_csv: file not found: " +
                                      pc.psd_csv.string());
            pc.psd_preset.clear();
        } else if (p.contains("psd_preset")) {
            pc.psd_preset = p["psd_preset"].get<std::string>();
            vehicle_psd_preset(pc.psd_preset);  // validates the name
        }
        pc.n_components = field_int_or(p, "n_components", pc.n_components, "perturbation");
        if (pc.n_components < 1) throw ValidationError("perturbation.n_components: must be >= 1");
        if (p.contains("band_hz")) {
            if (!p["band_hz"].is_array() || p["band_hz"].size() != 2)
                throw ValidationError("perturbation.band_hz: must be [lo, hi]");
            pc.band_lo_hz = p["band_hz"][0].get<double>();
            pc.band_hi_hz = p["band_hz"][1].get<double>();
            if (!(pc.band_lo_hz > 0.0) || !(pc.band_hi_hz > pc.band_lo_hz))
                throw ValidationError("perturbation.band_hz: need 0 < lo < hi");
        }
        pc.record_length_s =
            field_double_or(p, "record_length_s", pc.record_length_s, "perturbation");
        if (p.contains("target_rms"))
            pc.target_rms = field_double(p, "target_rms", "perturbation");
        pc.phase_trials = field_int_or(p, "phase_trials", pc.phase_trials, "perturbation");
        if (pc.phase_trials < 1) throw ValidationError("perturbation.phase_trials: must be >= 1");
        pc.phase_seed = field_seed_or(p, "phase_seed", pc.phase_seed, "perturbation");
    }

    if (j.contains("reference")) {
        const json& r = j["reference"];
        if (!r.is_object()) throw ValidationError("reference: must be an object");
        if (r.contains("kind")) {
            if (!r["kind"].is_string()) throw ValidationError("reference.kind: must be a string");
            c.reference_kind = reference_kind_from_string(r["kind"].get<std::string>());
        }
        c.reference_seed = field_seed_or(r, "seed", c.reference_seed, "reference");
        c.reference_options.center_y =
            field_double_or(r, "center_y", c.reference_options.center_y, "reference");
        c.reference_options.center_z =
            field_double_or(r, "center_z", c.reference_options.center_z, "reference");
        c.reference_options.amp_y =
            field_double_or(r, "amp_y", c.reference_options.amp_y, "reference");
        c.reference_options.amp_z =
            field_double_or(r, "amp_z", c.reference_options.amp_z, "reference");
    }

    c.duration_s = field_double_or(j, "duration_s", c.duration_s, "config");
    if (!(c.duration_s > 0.0)) throw ValidationError("config.duration_s: must be > 0");
    c.sample_rate_hz = field_double_or(j, "sample_rate_hz", c.sample_rate_hz, "config");
    if (!(c.sample_rate_hz > 0.0)) throw ValidationError("config.sample_rate_hz: must be > 0");
    c.plot_participant = field_int_or(j, "plot_participant", c.plot_participant, "config");
    if (c.plot_participant < 0 || c.plot_participant >= c.population_size)
        throw ValidationError("config.plot_participant: outside the population");

    if (seed_override.has_value()) {
        c.population_seed = *seed_override;
        c.reference_seed = *seed_override + 1;
        c.perturbation.phase_seed = *seed_override + 2;
    }
    return c;
}

MultisineSpec build_perturbation_spec(const PerturbationConfig& config) {
    if (config.spec.has_value()) return *config.spec;

    std::vector<PsdPoint> psd;
    if (!config.psd_preset.empty()) {
        psd = vehicle_psd_preset(config.psd_preset);
    } else if (!config.psd_csv.empty()) {
        std::istringstream in(io::read_text_file(config.psd_csv));
        psd = io::read_psd_csv(in, config.psd_csv.string());
    } else {
        throw ValidationError("perturbation: no spec, preset, or PSD file given");
    }

    MultisineSpec spec =
        fit_multisine_to_psd(psd, config.n_components,
                             {config.band_lo_hz, config.band_hi_hz}, config.record_length_s);
    if (config.target_rms.has_value()) spec = scaled_to_rms(spec, *config.target_rms);
    return randomize_phases(spec, config.phase_seed, config.phase_trials);
}

ExperimentSummary summarize(const std::vector<ParticipantResult>& participants) {
    ExperimentSummary s;
    s.participants = static_cast<int>(participants.size());
    if (participants.empty()) return s;
    for (const auto& p : participants) {
        const double ind = 0.5 * (p.y.vaf_individual + p.z.vaf_individual);
        const double avg = 0.5 * (p.y.vaf_average + p.z.vaf_average);
        const double none = 0.5 * (p.y.vaf_none + p.z.vaf_none);
        s.mean_vaf_individual += ind;
        s.mean_vaf_average += avg;
        s.mean_vaf_none += none;
        if (ind >= avg) ++s.ordering_holds;
    }
    const auto n = static_cast<double>(participants.size());
    s.mean_vaf_individual /= n;
    s.mean_vaf_average /= n;
    s.mean_vaf_none /= n;
    s.mean_vaf_gap = s.mean_vaf_individual - s.mean_vaf_average;
    return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result;
    result.config = config;
    result.spec = build_perturbation_spec(config.perturbation);

    const ReferenceTrajectory reference =
        make_reference(config.reference_kind, config.duration_s, config.sample_rate_hz,
                       config.reference_seed, config.reference_options);
    const std::vector<SyntheticParticipant> population = make_population(
        config.population_size, config.population_spread, config.base, config.population_seed);

    struct Stage {
        int index;
        Trial trial;
        FrequencyResponse frf_y, frf_z;
        FitResult fit_y, fit_z;
    };
    std::vector<Stage> stages;
    for (int i = 0; i < static_cast<int>(population.size()); ++i) {
        try {
            Stage st;
            st.index = i;
            st.trial = run_trial(population[static_cast<std::size_t>(i)], reference, result.spec,
                                 config.sample_rate_hz, config.duration_s);
            st.frf_y = estimate_frf(st.trial.perturbation_y, st.trial.recorded_y, result.spec);
            st.frf_z = estimate_frf(st.trial.perturbation_z, st.trial.recorded_z, result.spec);
            st.fit_y = fit_bdft_model(st.frf_y);
            st.fit_z = fit_bdft_model(st.frf_z);
            stages.push_back(std::move(st));
        } catch (const std::exception& e) {
            result.failures.push_back({i, e.what()});
        }
    }
    if (stages.empty()) return result;

    // population-average model: parameter-wise mean of the individual fits
    BdftParams avg_y{0, 0, 0}, avg_z{0, 0, 0};
    for (const auto& st : stages) {
        avg_y.gain += st.fit_y.params.gain;
        avg_y.natural_frequency += st.fit_y.params.natural_frequency;
        avg_y.damping_ratio += st.fit_y.params.damping_ratio;
        avg_z.gain += st.fit_z.params.gain;
        avg_z.natural_frequency += st.fit_z.params.natural_frequency;
        avg_z.damping_ratio += st.fit_z.params.damping_ratio;
    }
    const auto n_ok = static_cast<double>(stages.size());
    for (BdftParams* p : {&avg_y, &avg_z}) {
        p->gain /= n_ok;
        p->natural_frequency /= n_ok;
        p->damping_ratio /= n_ok;
    }
    result.average_y = avg_y;
    result.average_z = avg_z;

    for (auto& st : stages) {
        try {
            const auto [ind_y, ind_z] = cancel_batch(st.trial, st.fit_y.params, st.fit_z.params);
            const auto [av_y, av_z] = cancel_batch(st.trial, avg_y, avg_z);

            ParticipantResult pr;
            pr.index = st.index;
            pr.truth = population[static_cast<std::size_t>(st.index)];

            auto fill_axis = [&](AxisResult& ar, const FitResult& fit, FrequencyResponse& frf,
                                 const TimeSeries& voluntary, const TimeSeries& recorded,
                                 const TimeSeries& perturbation, const TimeSeries& cancelled_ind,
                                 const TimeSeries& cancelled_avg, const BdftParams& avg) {
                ar.fitted = fit.params;
                ar.frf = std::move(frf);
                ar.fit_residual = fit.residual;
                ar.fit_converged = fit.converged;
                ar.vaf_none = vaf(voluntary, recorded);
                ar.vaf_individual = vaf(voluntary, cancelled_ind);
                ar.vaf_average = vaf(voluntary, cancelled_avg);

                // model quality on the isolated feedthrough channel
                TimeSeries bdft_channel;
                bdft_channel.sample_rate = recorded.sample_rate;
                bdft_channel.samples.resize(recorded.samples.size());
                for (std::size_t k = 0; k < recorded.samples.size(); ++k)
                    bdft_channel.samples[k] = recorded.samples[k] - voluntary.samples[k];
                ar.model_vaf_individual =
                    vaf(bdft_channel, simulate_response(fit.params, perturbation));
                ar.model_vaf_average = vaf(bdft_channel, simulate_response(avg, perturbation));
            };

            fill_axis(pr.y, st.fit_y, st.frf_y, *st.trial.voluntary_y, st.trial.recorded_y,
                      st.trial.perturbation_y, ind_y, av_y, avg_y);
            fill_axis(pr.z, st.fit_z, st.frf_z, *st.trial.voluntary_z, st.trial.recorded_z,
                      st.trial.perturbation_z, ind_z, av_z, avg_z);
            result.participants.push_back(std::move(pr));
        } catch (const std::exception& e) {
            result.failures.push_back({st.index, e.what()});
        }
    }

    result.summary = summarize(result.participants);
    return result;
}

namespace {

json params_json(const BdftParams& p) {
    return {{"gain", p.gain},
            {"natural_frequency_rad_s", p.natural_frequency},
            {"damping_ratio", p.damping_ratio}};
}

json frf_json(const FrequencyResponse& frf) {
    json points = json::array();
    for (const auto& pt : frf.points)
        points.push_back({{"omega_rad_s", pt.omega},
                          {"re", pt.value.real()},
                          {"im", pt.value.imag()},
                          {"weight", pt.weight}});
    return points;
}

json axis_json(const AxisResult& a) {
    return {{"fitted", params_json(a.fitted)},
            {"frf", frf_json(a.frf)},
            {"fit_residual", a.fit_residual},
            {"fit_converged", a.fit_converged},
            {"vaf_individual", a.vaf_individual},
            {"vaf_average", a.vaf_average},
            {"vaf_none", a.vaf_none},
            {"model_vaf_individual", a.model_vaf_individual},
            {"model_vaf_average", a.model_vaf_average}};
}

}  // namespace

std::string to_json(const ExperimentResult& result) {
    const ExperimentConfig& c = result.config;
    json j;
    j["config"] = {
        {"population",
         {{"size", c.population_size},
          {"spread", c.population_spread},
          {"seed", c.population_seed},
          {"base",
           {{"bdft_y", params_json(c.base.bdft_y)},
            {"bdft_z", params_json(c.base.bdft_z)},
            {"tracking_bandwidth_rad_s", c.base.tracking_bandwidth},
            {"remnant_level_mm", c.base.remnant_level}}}}},
        {"reference",
         {{"kind", to_string(c.reference_kind)},
          {"seed", c.reference_seed},
          {"center_y", c.reference_options.center_y},
          {"center_z", c.reference_options.center_z},
          {"amp_y", c.reference_options.amp_y},
          {"amp_z", c.reference_options.amp_z}}},
        {"duration_s", c.duration_s},
        {"sample_rate_hz", c.sample_rate_hz}};
    j["perturbation_spec"] = json::parse(io::to_json(result.spec));
    j["average_model"] = {{"y", params_json(result.average_y)},
                          {"z", params_json(result.average_z)}};

    json parts = json::array();
    for (const auto& p : result.participants) {
        parts.push_back({{"participant", p.index},
                         {"truth",
                          {{"bdft_y", params_json(p.truth.bdft_y)},
                           {"bdft_z", params_json(p.truth.bdft_z)},
                           {"remnant_level_mm", p.truth.remnant_level},
                           {"tracking_bandwidth_rad_s", p.truth.tracking_bandwidth}}},
                         {"y", axis_json(p.y)},
                         {"z", axis_json(p.z)}});
    }
    j["participants"] = parts;

    json fails = json::array();
    for (const auto& f : result.failures)
        fails.push_back({{"participant", f.index}, {"error", f.error}});
    j["failures"] = fails;

    j["summary"] = {{"participants", result.summary.participants},
                    {"mean_vaf_individual", result.summary.mean_vaf_individual},
                    {"mean_vaf_average", result.summary.mean_vaf_average},
                    {"mean_vaf_none", result.summary.mean_vaf_none},
                    {"mean_vaf_gap", result.summary.mean_vaf_gap},
                    {"ordering_holds", result.summary.ordering_holds}};
    return j.dump(2);
}

std::string to_csv_table(const ExperimentResult& result) {
    std::ostringstream out;
    out << "participant,axis,gain,natural_frequency_rad_s,damping_ratio,"
           "true_gain,true_natural_frequency_rad_s,true_damping_ratio,"
           "vaf_none,vaf_average,vaf_individual,model_vaf_average,model_vaf_individual\n";
    char buf[512];
    for (const auto& p : result.participants) {
        const std::pair<const char*, const AxisResult*> axes[] = {{"y", &p.y}, {"z", &p.z}};
        const BdftParams* truth[] = {&p.truth.bdft_y, &p.truth.bdft_z};
        for (int a = 0; a < 2; ++a) {
            const AxisResult& ar = *axes[a].second;
            std::snprintf(buf, sizeof(buf),
                          "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                          p.index, axes[a].first, ar.fitted.gain, ar.fitted.natural_frequency,
                          ar.fitted.damping_ratio, truth[a]->gain, truth[a]->natural_frequency,
                          truth[a]->damping_ratio, ar.vaf_none, ar.vaf_average,
                          ar.vaf_individual, ar.model_vaf_average, ar.model_vaf_individual);
            out << buf;
        }
    }
    return out.str();
}

void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    io::write_text_file(out_dir / "result.json", to_json(result));
    io::write_text_file(out_dir / "table.csv", to_csv_table(result));

    // Bode plot for one participant: measured FRF points against the
    // individual and population-average fitted models.
    std::string svg;
    const auto it = std::find_if(
        result.participants.begin(), result.participants.end(),
        [&](const ParticipantResult& p) { return p.index == result.config.plot_participant; });
    if (it != result.participants.end()) {
        std::vector<double> grid;
        const double w_lo = it->y.frf.points.front().omega / 2.0;
        const double w_hi = it->y.frf.points.back().omega * 2.0;
        for (int i = 0; i <= 200; ++i)
            grid.push_back(w_lo * std::pow(w_hi / w_lo, i / 200.0));

        auto curve = [&](const BdftParams& p, const std::string& label,
                         const std::string& color) {
            BodeSeries s;
            s.label = label;
            s.color = color;
            s.omega = grid;
            for (double w : grid) s.value.push_back(frf_value(p, w));
            return s;
        };
        BodeSeries measured;
        measured.label = "measured FRF (y)";
        measured.color = "#c62828";
        measured.markers = true;
        for (const auto& pt : it->y.frf.points) {
            measured.omega.push_back(pt.omega);
            measured.value.push_back(pt.value);
        }
        svg = bode_svg({measured, curve(it->y.fitted, "individual model (y)", "#2e7d32"),
                        curve(result.average_y, "average model (y)", "#1565c0")},
                       "feedthrough dynamics, participant " + std::to_string(it->index));
    } else {
        svg = bode_svg({}, "no participant available for plotting");
    }
    io::write_text_file(out_dir / "bode.svg", svg);
}

}  // namespace bdft
