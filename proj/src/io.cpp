// SPDX-License-Identifier: Apache-2.0
#include "bdft/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bdft::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

double get_double(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ValidationError(ctx + ": missing field '" + key + "'");
    if (!j[key].is_number()) throw ValidationError(ctx + ": field '" + key + "' must be a number");
    return j[key].get<double>();
}

// --- CSV helpers ------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& text, const std::string& origin, std::size_t line_no,
                    const std::string& column) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(origin + ": line " + std::to_string(line_no) + ": column " +
                              column + ": invalid number '" + text + "'");
    }
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // column-major access via header index
};

CsvTable read_csv(std::istream& in, const std::string& origin) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (table.header.empty()) {
            table.header = split_csv_line(line);
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != table.header.size())
            throw ValidationError(origin + ": line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " columns, got " +
                                  std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            row[c] = parse_number(fields[c], origin, line_no, table.header[c]);
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ValidationError(origin + ": missing header row");
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name,
                         const std::string& origin) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == name) return i;
    throw ValidationError(origin + ": missing column '" + name + "'");
}

bool has_column(const CsvTable& table, const std::string& name) {
    for (const auto& h : table.header)
        if (h == name) return true;
    return false;
}

std::vector<double> column(const CsvTable& table, std::size_t idx) {
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) out.push_back(row[idx]);
    return out;
}

// Recovers the sample rate from a uniform time column.
double infer_sample_rate(const std::vector<double>& t, const std::string& origin) {
    if (t.size() < 2) throw ValidationError(origin + ": need at least two rows");
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw ValidationError(origin + ": time column must be increasing");
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double expected = t[0] + static_cast<double>(i) * dt;
        if (std::abs(t[i] - expected) > 1e-6 * dt)
            throw ValidationError(origin + ": time column is not uniformly sampled at row " +
                                  std::to_string(i + 2));
    }
    return 1.0 / dt;
}

}  // namespace

// --- MultisineSpec -----------------------------------------------------------

std::string to_json(const MultisineSpec& spec) {
    json arr = json::array();
    for (const auto& c : spec.components())
        arr.push_back({{"amplitude", c.amplitude},
                       {"freq_rad_s", c.freq_rad_s},
                       {"phase_rad", c.phase_rad}});
    return arr.dump(2);
}

MultisineSpec multisine_spec_from_json(const std::string& text) {
    const json arr = parse_json(text, "multisine spec");
    if (!arr.is_array()) throw ValidationError("multisine spec: expected a JSON array");
    std::vector<SineComponent> comps;
    comps.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string ctx = "multisine spec[" + std::to_string(i) + "]";
        if (!arr[i].is_object()) throw ValidationError(ctx + ": expected an object");
        comps.push_back({get_double(arr[i], "amplitude", ctx),
                         get_double(arr[i], "freq_rad_s", ctx),
                         get_double(arr[i], "phase_rad", ctx)});
    }
    return MultisineSpec(std::move(comps));
}

// --- BdftParams ---------------------------------------------------------------

std::string to_json(const BdftParams& params) {
    const json j = {{"gain", params.gain},
                    {"natural_frequency_rad_s", params.natural_frequency},
                    {"damping_ratio", params.damping_ratio}};
    return j.dump(2);
}

BdftParams bdft_params_from_json(const std::string& text) {
    const json j = parse_json(text, "model params");
    if (!j.is_object()) throw ValidationError("model params: expected a JSON object");
    BdftParams p{get_double(j, "gain", "model params"),
                 get_double(j, "natural_frequency_rad_s", "model params"),
                 get_double(j, "damping_ratio", "model params")};
    validate(p);
    return p;
}

// --- FrequencyResponse ---------------------------------------------------------

std::string to_json(const FrequencyResponse& frf) {
    json points = json::array();
    for (const auto& pt : frf.points)
        points.push_back({{"omega_rad_s", pt.omega},
                          {"re", pt.value.real()},
                          {"im", pt.value.imag()},
                          {"weight", pt.weight}});
    return json{{"points", points}}.dump(2);
}

FrequencyResponse frf_from_json(const std::string& text) {
    const json j = parse_json(text, "frequency response");
    if (!j.is_object() || !j.contains("points") || !j["points"].is_array())
        throw ValidationError("frequency response: expected an object with a 'points' array");
    FrequencyResponse frf;
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
        const std::string ctx = "frequency response point " + std::to_string(i);
        const json& pj = j["points"][i];
        FrfPoint pt;
        pt.omega = get_double(pj, "omega_rad_s", ctx);
        pt.value = {get_double(pj, "re", ctx), get_double(pj, "im", ctx)};
        pt.weight = get_double(pj, "weight", ctx);
        frf.points.push_back(pt);
    }
    validate(frf);
    return frf;
}

std::string to_json(const FitResult& fit) {
    const json j = {{"params", json::parse(to_json(fit.params))},
                    {"residual", fit.residual},
                    {"iterations", fit.iterations},
                    {"converged", fit.converged}};
    return j.dump(2);
}

// --- LpvSchedule ----------------------------------------------------------------

std::string to_json(const LpvSchedule& s) {
    const json j = {{"base", json::parse(to_json(s.base))},
                    {"sensitivities",
                     {{"gain", s.sensitivities.gain},
                      {"natural_frequency", s.sensitivities.natural_frequency},
                      {"damping_ratio", s.sensitivities.damping_ratio}}},
                    {"variable_name", s.variable_name},
                    {"reference_value", s.reference_value},
                    {"range", {s.range_min, s.range_max}}};
    return j.dump(2);
}

LpvSchedule lpv_schedule_from_json(const std::string& text) {
    const json j = parse_json(text, "LPV schedule");
    if (!j.is_object()) throw ValidationError("LPV schedule: expected a JSON object");
    if (!j.contains("base")) throw ValidationError("LPV schedule: missing field 'base'");
    if (!j.contains("sensitivities") || !j["sensitivities"].is_object())
        throw ValidationError("LPV schedule: missing object field 'sensitivities'");
    if (!j.contains("range") || !j["range"].is_array() || j["range"].size() != 2)
        throw ValidationError("LPV schedule: field 'range' must be [min, max]");

    const BdftParams base = bdft_params_from_json(j["base"].dump());
    const json& sj = j["sensitivities"];
    const LpvSensitivities sens{get_double(sj, "gain", "LPV sensitivities"),
                                get_double(sj, "natural_frequency", "LPV sensitivities"),
                                get_double(sj, "damping_ratio", "LPV sensitivities")};
    const std::string name =
        j.contains("variable_name") && j["variable_name"].is_string()
            ? j["variable_name"].get<std::string>()
            : "variable";
    return make_lpv_schedule(base, sens, name, get_double(j, "reference_value", "LPV schedule"),
                             j["range"][0].get<double>(), j["range"][1].get<double>());
}

// --- CSV -------------------------------------------------------------------------

void write_psd_csv(std::ostream& out, const std::vector<PsdPoint>& psd) {
    out << "freq_hz,psd\n";
    for (const auto& p : psd) out << fmt(p.freq_hz) << ',' << fmt(p.psd) << '\n';
}

std::vector<PsdPoint> read_psd_csv(std::istream& in, const std::string& origin) {
    const CsvTable table = read_csv(in, origin);
    const std::size_t fcol = column_index(table, "freq_hz", origin);
    const std::size_t pcol = column_index(table, "psd", origin);
    std::vector<PsdPoint> psd;
    psd.reserve(table.rows.size());
    for (const auto& row : table.rows) psd.push_back({row[fcol], row[pcol]});
    validate_psd(psd);
    return psd;
}

void write_signal_csv(std::ostream& out, const TimeSeries& series) {
    out << "t,fd\n";
    for (std::size_t i = 0; i < series.samples.size(); ++i)
        out << fmt(static_cast<double>(i) / series.sample_rate) << ',' << fmt(series.samples[i])
            << '\n';
}

void write_frf_csv(std::ostream& out, const FrequencyResponse& frf) {
    out << "omega_rad_s,re,im,weight\n";
    for (const auto& pt : frf.points)
        out << fmt(pt.omega) << ',' << fmt(pt.value.real()) << ',' << fmt(pt.value.imag()) << ','
            << fmt(pt.weight) << '\n';
}

FrequencyResponse read_frf_csv(std::istream& in, const std::string& origin) {
    const CsvTable table = read_csv(in, origin);
    const std::size_t wcol = column_index(table, "omega_rad_s", origin);
    const std::size_t recol = column_index(table, "re", origin);
    const std::size_t imcol = column_index(table, "im", origin);
    const std::size_t wtcol = column_index(table, "weight", origin);
    FrequencyResponse frf;
    for (const auto& row : table.rows)
        frf.points.push_back({row[wcol], {row[recol], row[imcol]}, row[wtcol]});
    validate(frf);
    return frf;
}

void write_trial_csv(std::ostream& out, const Trial& trial) {
    validate(trial);
    const bool with_truth = trial.voluntary_y && trial.voluntary_z && trial.truth_bdft_y &&
                            trial.truth_bdft_z;
    out << "t,fd_y,fd_z,u_y,u_z";
    if (with_truth) out << ",uvol_y,uvol_z,ubdft_y,ubdft_z";
    out << '\n';
    const double fs = trial.recorded_y.sample_rate;
    for (std::size_t i = 0; i < trial.recorded_y.samples.size(); ++i) {
        out << fmt(static_cast<double>(i) / fs) << ',' << fmt(trial.perturbation_y.samples[i])
            << ',' << fmt(trial.perturbation_z.samples[i]) << ','
            << fmt(trial.recorded_y.samples[i]) << ',' << fmt(trial.recorded_z.samples[i]);
        if (with_truth)
            out << ',' << fmt(trial.voluntary_y->samples[i]) << ','
                << fmt(trial.voluntary_z->samples[i]) << ','
                << fmt(trial.truth_bdft_y->samples[i]) << ','
                << fmt(trial.truth_bdft_z->samples[i]);
        out << '\n';
    }
}

Trial read_trial_csv(std::istream& in, const std::string& origin) {
    const CsvTable table = read_csv(in, origin);
    const double fs = infer_sample_rate(column(table, column_index(table, "t", origin)), origin);

    auto series = [&](const std::string& name) {
        return TimeSeries{column(table, column_index(table, name, origin)), fs};
    };

    Trial trial;
    trial.perturbation_y = series("fd_y");
    trial.perturbation_z = series("fd_z");
    trial.recorded_y = series("u_y");
    trial.recorded_z = series("u_z");
    if (has_column(table, "uvol_y") || has_column(table, "uvol_z")) {
        trial.voluntary_y = series("uvol_y");
        trial.voluntary_z = series("uvol_z");
    }
    if (has_column(table, "ubdft_y") || has_column(table, "ubdft_z")) {
        trial.truth_bdft_y = series("ubdft_y");
        trial.truth_bdft_z = series("ubdft_z");
    }
    validate(trial);
    return trial;
}

void write_cancelled_csv(std::ostream& out, const TimeSeries& ucan_y, const TimeSeries& ucan_z) {
    require_same_grid(ucan_y, ucan_z);
    out << "t,ucan_y,ucan_z\n";
    for (std::size_t i = 0; i < ucan_y.samples.size(); ++i)
        out << fmt(static_cast<double>(i) / ucan_y.sample_rate) << ',' << fmt(ucan_y.samples[i])
            << ',' << fmt(ucan_z.samples[i]) << '\n';
}

// --- files --------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace bdft::io
