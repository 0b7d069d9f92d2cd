// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: signal design, dataset synthesis, identification,
// model fitting, and model-based cancellation of motion feedthrough in
// touch input streams.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdft/cancellation.hpp"
#include "bdft/experiment.hpp"
#include "bdft/identification.hpp"
#include "bdft/io.hpp"
#include "bdft/multisine.hpp"
#include "bdft/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    fs::path out_dir = ".";
    fs::path config;
};

json load_config(const fs::path& path) {
    if (path.empty()) throw bdft::ValidationError("no config file given (use --config)");
    if (!fs::exists(path))
        throw bdft::ValidationError("config file not found: " + path.string());
    try {
        return json::parse(bdft::io::read_text_file(path));
    } catch (const json::parse_error& e) {
        throw bdft::ValidationError(path.string() + ": " + e.what());
    }
}

double jget(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw bdft::ValidationError(path + "." + key + ": missing");
    if (!j[key].is_number())
        throw bdft::ValidationError(path + "." + key + ": must be a number");
    return j[key].get<double>();
}

double jget_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j[key].get<double>() : fallback;
}

bdft::MultisineSpec spec_from_config(const json& cfg) {
    if (cfg.contains("spec")) return bdft::io::multisine_spec_from_json(cfg["spec"].dump());
    if (cfg.contains("spec_json")) {
        const fs::path path = cfg["spec_json"].get<std::string>();
        if (!fs::exists(path))
            throw bdft::ValidationError("spec_json: file not found: " + path.string());
        return bdft::io::multisine_spec_from_json(bdft::io::read_text_file(path));
    }
    if (cfg.contains("psd")) {
        const json& p = cfg["psd"];
        std::vector<bdft::PsdPoint> psd;
        if (p.contains("preset")) {
            psd = bdft::vehicle_psd_preset(p["preset"].get<std::string>());
        } else if (p.contains("csv")) {
            const fs::path path = p["csv"].get<std::string>();
            if (!fs::exists(path))
                throw bdft::ValidationError("psd.csv: file not found: " + path.string());
            std::istringstream in(bdft::io::read_text_file(path));
            psd = bdft::io::read_psd_csv(in, path.string());
        } else {
            throw bdft::ValidationError("psd: needs 'preset' or 'csv'");
        }
        if (!p.contains("band_hz") || !p["band_hz"].is_array() || p["band_hz"].size() != 2)
            throw bdft::ValidationError("psd.band_hz: must be [lo, hi]");
        const int n = p.contains("n_components") ? p["n_components"].get<int>() : 10;
        bdft::MultisineSpec spec = bdft::fit_multisine_to_psd(
            psd, n, {p["band_hz"][0].get<double>(), p["band_hz"][1].get<double>()},
            jget_or(p, "record_length_s", 60.0));
        if (p.contains("target_rms"))
            spec = bdft::scaled_to_rms(spec, p["target_rms"].get<double>());
        return spec;
    }
    throw bdft::ValidationError("config: needs one of 'spec', 'spec_json', or 'psd'");
}

bdft::SyntheticParticipant participant_from_config(const json& cfg, const GlobalOpts& g) {
    if (!cfg.contains("participant") || !cfg["participant"].is_object())
        throw bdft::ValidationError("config.participant: missing object");
    const json& p = cfg["participant"];
    auto params = [&](const char* key) {
        if (!p.contains(key))
            throw bdft::ValidationError(std::string("participant.") + key + ": missing");
        return bdft::io::bdft_params_from_json(p[key].dump());
    };
    bdft::SyntheticParticipant out;
    out.bdft_y = params("bdft_y");
    out.bdft_z = params("bdft_z");
    out.tracking_bandwidth = jget_or(p, "tracking_bandwidth_rad_s", 4.0);
    out.remnant_level = jget_or(p, "remnant_level_mm", 0.0);
    out.rng_seed = g.seed.value_or(
        p.contains("seed") ? p["seed"].get<std::uint64_t>() : 1);
    validate(out);
    return out;
}

int cmd_gen_signal(const GlobalOpts& g) {
    const json cfg = load_config(g.config);
    bdft::MultisineSpec spec = spec_from_config(cfg);
    if (cfg.contains("phase_randomization")) {
        const json& pr = cfg["phase_randomization"];
        const int trials = pr.contains("trials") ? pr["trials"].get<int>() : 100;
        const std::uint64_t seed =
            g.seed.value_or(pr.contains("seed") ? pr["seed"].get<std::uint64_t>() : 1);
        spec = bdft::randomize_phases(spec, seed, trials);
    }
    const double fs = jget(cfg, "sample_rate_hz", "config");
    const double duration = jget(cfg, "duration_s", "config");
    const bdft::TimeSeries signal = bdft::generate_multisine(spec, fs, duration);

    fs::create_directories(g.out_dir);
    std::ofstream csv(g.out_dir / "signal.csv");
    bdft::io::write_signal_csv(csv, signal);
    bdft::io::write_text_file(g.out_dir / "spec.json", bdft::io::to_json(spec));

    const json report = {{"n_components", spec.size()},
                         {"crest_factor", bdft::crest_factor(signal)},
                         {"rms", bdft::rms(signal)},
                         {"peak_abs", bdft::peak_abs(signal.samples)},
                         {"analytic_rms", spec.analytic_rms()},
                         {"sample_rate_hz", fs},
                         {"duration_s", duration}};
    bdft::io::write_text_file(g.out_dir / "report.json", report.dump(2));
    std::cout << "wrote " << (g.out_dir / "signal.csv").string() << ", spec.json, report.json\n";
    return 0;
}

int cmd_simulate(const GlobalOpts& g) {
    const json cfg = load_config(g.config);
    const bdft::SyntheticParticipant participant = participant_from_config(cfg, g);
    const bdft::MultisineSpec spec = spec_from_config(cfg);
    const double fs = jget(cfg, "sample_rate_hz", "config");
    const double duration = jget(cfg, "duration_s", "config");

    bdft::ReferenceKind kind = bdft::ReferenceKind::kLissajous;
    bdft::ReferenceOptions opts;
    std::uint64_t ref_seed = g.seed.value_or(1);
    if (cfg.contains("reference")) {
        const json& r = cfg["reference"];
        if (r.contains("kind"))
            kind = bdft::reference_kind_from_string(r["kind"].get<std::string>());
        if (r.contains("seed") && !g.seed)
            ref_seed = r["seed"].get<std::uint64_t>();
        opts.center_y = jget_or(r, "center_y", opts.center_y);
        opts.center_z = jget_or(r, "center_z", opts.center_z);
        opts.amp_y = jget_or(r, "amp_y", opts.amp_y);
        opts.amp_z = jget_or(r, "amp_z", opts.amp_z);
    }

    bdft::TrialOptions topts;
    if (cfg.contains("synthesis")) {
        const std::string s = cfg["synthesis"].get<std::string>();
        if (s == "analytic")
            topts.synthesis = bdft::BdftSynthesis::kAnalytic;
        else if (s == "discretized")
            topts.synthesis = bdft::BdftSynthesis::kDiscretized;
        else
            throw bdft::ValidationError("config.synthesis: must be 'analytic' or 'discretized'");
    }
    if (cfg.contains("enforce_spectral_separation"))
        topts.enforce_spectral_separation = cfg["enforce_spectral_separation"].get<bool>();

    const auto reference = bdft::make_reference(kind, duration, fs, ref_seed, opts);
    const bdft::Trial trial =
        bdft::run_trial(participant, reference, spec, fs, duration, topts);

    fs::create_directories(g.out_dir);
    std::ofstream out(g.out_dir / "trial.csv");
    bdft::io::write_trial_csv(out, trial);
    if (trial.offscreen_samples > 0)
        std::cerr << "warning: " << trial.offscreen_samples
                  << " samples fell outside the screen box\n";
    std::cout << "wrote " << (g.out_dir / "trial.csv").string() << "\n";
    return 0;
}

int cmd_identify(const GlobalOpts& g, const fs::path& trial_path, const fs::path& spec_path,
                 const std::string& axis) {
    if (!fs::exists(trial_path))
        throw bdft::ValidationError("trial file not found: " + trial_path.string());
    if (!fs::exists(spec_path))
        throw bdft::ValidationError("spec file not found: " + spec_path.string());
    std::istringstream in(bdft::io::read_text_file(trial_path));
    const bdft::Trial trial = bdft::io::read_trial_csv(in, trial_path.string());
    const bdft::MultisineSpec spec =
        bdft::io::multisine_spec_from_json(bdft::io::read_text_file(spec_path));

    fs::create_directories(g.out_dir);
    auto emit = [&](const char* name, const bdft::TimeSeries& fd, const bdft::TimeSeries& u) {
        const bdft::FrequencyResponse frf = bdft::estimate_frf(fd, u, spec);
        std::ofstream csv(g.out_dir / (std::string("frf_") + name + ".csv"));
        bdft::io::write_frf_csv(csv, frf);
        bdft::io::write_text_file(g.out_dir / (std::string("frf_") + name + ".json"),
                                  bdft::io::to_json(frf));
        std::cout << "wrote frf_" << name << ".csv / .json\n";
    };
    if (axis == "y" || axis == "both") emit("y", trial.perturbation_y, trial.recorded_y);
    if (axis == "z" || axis == "both") emit("z", trial.perturbation_z, trial.recorded_z);
    return 0;
}

int cmd_fit(const GlobalOpts& g, const fs::path& frf_path, const fs::path& init_path,
            const std::string& tag) {
    if (!fs::exists(frf_path))
        throw bdft::ValidationError("frf file not found: " + frf_path.string());
    bdft::FrequencyResponse frf;
    if (frf_path.extension() == ".json") {
        frf = bdft::io::frf_from_json(bdft::io::read_text_file(frf_path));
    } else {
        std::istringstream in(bdft::io::read_text_file(frf_path));
        frf = bdft::io::read_frf_csv(in, frf_path.string());
    }
    std::optional<bdft::BdftParams> init;
    if (!init_path.empty()) {
        if (!fs::exists(init_path))
            throw bdft::ValidationError("init params file not found: " + init_path.string());
        init = bdft::io::bdft_params_from_json(bdft::io::read_text_file(init_path));
    }

    const bdft::FitResult fit = bdft::fit_bdft_model(frf, init);
    fs::create_directories(g.out_dir);
    const std::string suffix = tag.empty() ? "" : "_" + tag;
    bdft::io::write_text_file(g.out_dir / ("fit" + suffix + ".json"), bdft::io::to_json(fit));
    bdft::io::write_text_file(g.out_dir / ("params" + suffix + ".json"),
                              bdft::io::to_json(fit.params));
    if (!fit.converged) std::cerr << "warning: fit did not converge; best-so-far written\n";
    std::cout << "wrote fit" << suffix << ".json, params" << suffix << ".json (residual "
              << fit.residual << ")\n";
    return 0;
}

int cmd_cancel(const GlobalOpts& g, const fs::path& trial_path, const fs::path& py_path,
               const fs::path& pz_path, bool prewarp) {
    for (const auto& p : {trial_path, py_path, pz_path})
        if (!fs::exists(p)) throw bdft::ValidationError("file not found: " + p.string());
    std::istringstream in(bdft::io::read_text_file(trial_path));
    const bdft::Trial trial = bdft::io::read_trial_csv(in, trial_path.string());
    const bdft::BdftParams py =
        bdft::io::bdft_params_from_json(bdft::io::read_text_file(py_path));
    const bdft::BdftParams pz =
        bdft::io::bdft_params_from_json(bdft::io::read_text_file(pz_path));

    const auto [ucan_y, ucan_z] = bdft::cancel_batch(trial, py, pz, prewarp);
    fs::create_directories(g.out_dir);
    std::ofstream out(g.out_dir / "cancelled.csv");
    bdft::io::write_cancelled_csv(out, ucan_y, ucan_z);
    std::cout << "wrote " << (g.out_dir / "cancelled.csv").string() << "\n";
    return 0;
}

// stdin records t,fd_y,fd_z,u_y,u_z -> stdout records t,ucan_y,ucan_z.
// The sample rate comes from --rate or is inferred from the first two
// timestamps. A leading header line is tolerated and skipped.
int cmd_stream_cancel(const fs::path& py_path, const fs::path& pz_path, double rate,
                      bool prewarp) {
    for (const auto& p : {py_path, pz_path})
        if (!fs::exists(p)) throw bdft::ValidationError("file not found: " + p.string());
    const bdft::BdftParams py =
        bdft::io::bdft_params_from_json(bdft::io::read_text_file(py_path));
    const bdft::BdftParams pz =
        bdft::io::bdft_params_from_json(bdft::io::read_text_file(pz_path));

    std::optional<bdft::Canceller> canceller_y, canceller_z;
    if (rate > 0.0) {
        canceller_y.emplace(py, rate, prewarp);
        canceller_z.emplace(pz, rate, prewarp);
    }

    auto parse_record = [](const std::string& line, double rec[5]) {
        std::stringstream ss(line);
        std::string field;
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(ss, field, ','))
                throw bdft::ValidationError("stream record needs 5 fields: " + line);
            try {
                rec[i] = std::stod(field);
            } catch (const std::exception&) {
                throw bdft::ValidationError("stream record field " + std::to_string(i + 1) +
                                            " is not a number: " + field);
            }
        }
        return true;
    };

    char buf[128];
    auto emit = [&](double t, double ucan_y, double ucan_z) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, ucan_y, ucan_z);
        std::cout << buf << std::flush;
    };

    std::string line;
    std::optional<std::array<double, 5>> pending;  // first record while rate unknown
    bool first_line = true;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        if (first_line) {
            first_line = false;
            if (line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos)
                continue;  // header
        }
        double rec[5];
        parse_record(line, rec);
        if (!canceller_y) {
            if (!pending) {
                pending = {rec[0], rec[1], rec[2], rec[3], rec[4]};
                continue;
            }
            const double dt = rec[0] - (*pending)[0];
            if (!(dt > 0.0))
                throw bdft::ValidationError("cannot infer sample rate: timestamps not increasing");
            canceller_y.emplace(py, 1.0 / dt, prewarp);
            canceller_z.emplace(pz, 1.0 / dt, prewarp);
            emit((*pending)[0], canceller_y->push((*pending)[1], (*pending)[3]),
                 canceller_z->push((*pending)[2], (*pending)[4]));
            pending.reset();
        }
        emit(rec[0], canceller_y->push(rec[1], rec[3]), canceller_z->push(rec[2], rec[4]));
    }
    if (pending && !canceller_y)
        throw bdft::ValidationError("single record and no --rate: cannot infer sample rate");
    return 0;
}

int cmd_experiment(const GlobalOpts& g) {
    bdft::ExperimentConfig config;
    if (!g.config.empty()) {
        if (!fs::exists(g.config))
            throw bdft::ValidationError("config file not found: " + g.config.string());
        config = bdft::experiment_config_from_json(bdft::io::read_text_file(g.config), g.seed);
    } else {
        config = bdft::default_experiment_config();
        if (g.seed) {
            config.population_seed = *g.seed;
            config.reference_seed = *g.seed + 1;
            config.perturbation.phase_seed = *g.seed + 2;
        }
    }

    const bdft::ExperimentResult result = bdft::run_experiment(config);
    bdft::write_experiment_outputs(result, g.out_dir);

    const auto& s = result.summary;
    std::cout << "participants: " << s.participants << " (failures: " << result.failures.size()
              << ")\n"
              << "mean VAF: none " << s.mean_vaf_none << "  average-model " << s.mean_vaf_average
              << "  individual-model " << s.mean_vaf_individual << "\n"
              << "individual >= average for " << s.ordering_holds << "/" << s.participants
              << " participants (gap " << s.mean_vaf_gap << " points)\n"
              << "wrote " << (g.out_dir / "result.json").string() << ", table.csv, bode.svg\n";
    if (!result.failures.empty()) {
        for (const auto& f : result.failures)
            std::cerr << "participant " << f.index << " failed: " << f.error << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biodynamic feedthrough identification and cancellation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    GlobalOpts g;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override config seeds");
    app.add_option("--out-dir", g.out_dir, "output directory (default: .)");
    app.add_option("--config", g.config, "JSON config file");

    auto* gen = app.add_subcommand("gen-signal", "design a multisine perturbation signal");
    auto* sim = app.add_subcommand("simulate", "synthesize a labeled trial dataset");

    fs::path trial_path, spec_path, frf_path, init_path, py_path, pz_path;
    std::string axis = "both", tag;
    double rate = 0.0;
    bool prewarp = false;

    auto* ident = app.add_subcommand("identify", "estimate the feedthrough FRF from a trial");
    ident->add_option("--trial", trial_path, "trial CSV")->required();
    ident->add_option("--spec", spec_path, "multisine spec JSON")->required();
    ident->add_option("--axis", axis, "y, z, or both")
        ->check(CLI::IsMember({"y", "z", "both"}));

    auto* fit = app.add_subcommand("fit", "fit the second-order model to an FRF");
    fit->add_option("--frf", frf_path, "FRF CSV or JSON")->required();
    fit->add_option("--init", init_path, "initial params JSON (else multi-start)");
    fit->add_option("--tag", tag, "suffix for output files (e.g. y)");

    auto* cancel = app.add_subcommand("cancel", "batch model-based cancellation of a trial");
    cancel->add_option("--trial", trial_path, "trial CSV")->required();
    cancel->add_option("--params-y", py_path, "y-axis params JSON")->required();
    cancel->add_option("--params-z", pz_path, "z-axis params JSON")->required();
    cancel->add_flag("--prewarp", prewarp, "prewarp the discretization at the natural frequency");

    auto* stream = app.add_subcommand("stream-cancel",
                                      "cancel a live stream: stdin t,fd_y,fd_z,u_y,u_z -> "
                                      "stdout t,ucan_y,ucan_z");
    stream->add_option("--params-y", py_path, "y-axis params JSON")->required();
    stream->add_option("--params-z", pz_path, "z-axis params JSON")->required();
    stream->add_option("--rate", rate, "sample rate Hz (else inferred from timestamps)");
    stream->add_flag("--prewarp", prewarp,
                     "prewarp the discretization at the natural frequency");

    auto* exp = app.add_subcommand(
        "experiment", "population study: identify and cancel with individual vs average models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (seed_opt->count() > 0) g.seed = seed_value;

    try {
        if (gen->parsed()) return cmd_gen_signal(g);
        if (sim->parsed()) return cmd_simulate(g);
        if (ident->parsed()) return cmd_identify(g, trial_path, spec_path, axis);
        if (fit->parsed()) return cmd_fit(g, frf_path, init_path, tag);
        if (cancel->parsed()) return cmd_cancel(g, trial_path, py_path, pz_path, prewarp);
        if (stream->parsed()) return cmd_stream_cancel(py_path, pz_path, rate, prewarp);
        if (exp->parsed()) return cmd_experiment(g);
    } catch (const bdft::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
