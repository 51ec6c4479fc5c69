// SPDX-License-Identifier: Apache-2.0
//
// refcal - reference-path calibration for bistatic OFDM sensing
// Copyright (C) 2026 The refcal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "refcal/harness/config.hpp"
#include "refcal/harness/scenario.hpp"
#include "refcal/harness/summary.hpp"

namespace refcal::harness {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest decimal text that parses back to the same double ("nan"/"inf" for non-finite values).
std::string format_double(double v);

void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& os);
void write_summary_csv(const Summary& summary, std::ostream& os);
void write_cdf_csv(const Summary& summary, const std::string& metric, std::ostream& os);
/// Header row "delay_s,<doppler Hz>...", then one row per delay bin.
void write_doppler_csv(const DopplerMap& map, std::ostream& os);
void write_manifest(const ScenarioConfig& config, const Summary& summary, std::ostream& os);

/// Writes trials.csv, summary.csv, cdf_<metric>.csv, manifest.ini and, when given,
/// doppler_calibrated.csv / doppler_raw.csv into `out_dir` (created if missing).
/// Throws Error naming the path on I/O failure.
std::vector<std::filesystem::path> export_results(const std::vector<TrialRecord>& records, const Summary& summary,
                                                  const ScenarioConfig& config, const std::optional<DopplerResult>& doppler,
                                                  const std::filesystem::path& out_dir);

} // namespace refcal::harness
