// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bdft/bdft_model.hpp"
#include "bdft/identification.hpp"
#include "bdft/multisine.hpp"
#include "bdft/simulator.hpp"
#include "bdft/types.hpp"

// File formats. CSV columns and JSON keys are part of the toolkit's external
// contract; numbers are written with enough digits to round-trip exactly.

namespace bdft::io {

// --- JSON (string level; parsing errors name the offending field) ---------

std::string to_json(const MultisineSpec& spec);                 // array of components
MultisineSpec multisine_spec_from_json(const std::string& text);

std::string to_json(const BdftParams& params);                  // {gain, natural_frequency_rad_s, damping_ratio}
BdftParams bdft_params_from_json(const std::string& text);

std::string to_json(const FrequencyResponse& frf);
FrequencyResponse frf_from_json(const std::string& text);

std::string to_json(const FitResult& fit);

std::string to_json(const LpvSchedule& schedule);
LpvSchedule lpv_schedule_from_json(const std::string& text);

// --- CSV -------------------------------------------------------------------

/// Header `freq_hz,psd`.
void write_psd_csv(std::ostream& out, const std::vector<PsdPoint>& psd);
std::vector<PsdPoint> read_psd_csv(std::istream& in, const std::string& origin = "psd");

/// Header `t,fd` for single-channel perturbation signals.
void write_signal_csv(std::ostream& out, const TimeSeries& series);

/// Header `omega_rad_s,re,im,weight`.
void write_frf_csv(std::ostream& out, const FrequencyResponse& frf);
FrequencyResponse read_frf_csv(std::istream& in, const std::string& origin = "frf");

/// Header `t,fd_y,fd_z,u_y,u_z[,uvol_y,uvol_z,ubdft_y,ubdft_z]`; the truth
/// columns are written when the trial carries them and are optional on
/// ingest (real recordings lack them). Sample rate is recovered from the
/// uniform time column.
void write_trial_csv(std::ostream& out, const Trial& trial);
Trial read_trial_csv(std::istream& in, const std::string& origin = "trial");

/// Header `t,ucan_y,ucan_z`.
void write_cancelled_csv(std::ostream& out, const TimeSeries& ucan_y, const TimeSeries& ucan_z);

// --- files ------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace bdft::io
