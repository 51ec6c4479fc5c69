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

#include "refcal/harness/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "refcal/error.hpp"

namespace refcal::harness {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

template <typename Writer>
std::filesystem::path write_file(const std::filesystem::path& path, Writer&& writer)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("export: cannot write " + path.string());
    writer(os);
    os.flush();
    if (!os) throw Error("export: write failed for " + path.string());
    return path;
}

} // namespace

void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& os)
{
    os << "trial_id,snr_db,placement,reference_found,reference_kind,sync_error_s,localization_error_m,aoa_error_rad,"
          "failure,warnings\n";
    for (const auto& r : records) {
        std::string warnings;
        for (const auto& w : r.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
        os << r.trial_id << ',' << format_double(r.snr_db) << ',' << r.placement << ','
           << (r.reference_found ? 1 : 0) << ',' << r.reference_kind << ',' << format_double(r.sync_error_s) << ','
           << format_double(r.localization_error_m) << ',' << format_double(r.aoa_error_rad) << ','
           << csv_field(r.failure) << ',' << csv_field(warnings) << '\n';
    }
}

void write_summary_csv(const Summary& summary, std::ostream& os)
{
    os << "snr_db,metric,count,failed,mean,p50,p80,p95,max\n";
    for (const auto& s : summary.metrics)
        os << format_double(s.snr_db) << ',' << s.metric << ',' << s.count << ',' << s.failed << ','
           << format_double(s.mean) << ',' << format_double(s.p50) << ',' << format_double(s.p80) << ','
           << format_double(s.p95) << ',' << format_double(s.max) << '\n';
}

void write_cdf_csv(const Summary& summary, const std::string& metric, std::ostream& os)
{
    os << "snr_db,value,cumulative_fraction\n";
    for (const auto& cdf : summary.cdfs) {
        if (cdf.metric != metric) continue;
        for (const auto& [value, frac] : cdf.points)
            os << format_double(cdf.snr_db) << ',' << format_double(value) << ',' << format_double(frac) << '\n';
    }
}

void write_doppler_csv(const DopplerMap& map, std::ostream& os)
{
    os << "delay_s";
    for (double f : map.doppler_axis_hz) os << ',' << format_double(f);
    os << '\n';
    for (std::size_t u = 0; u < map.delay_bins; ++u) {
        os << format_double(static_cast<double>(u) * map.bin_duration_s);
        for (std::size_t k = 0; k < map.doppler_bins; ++k) os << ',' << format_double(map.at(u, k));
        os << '\n';
    }
}

void write_manifest(const ScenarioConfig& config, const Summary& summary, std::ostream& os)
{
    std::size_t trials = 0;
    for (const auto& m : summary.metrics)
        if (m.metric == "sync_error_s") trials += m.count + m.failed;
    os << "; refcal run manifest\n"
       << "[tool]\nname = refcal\nversion = " << kToolVersion << "\n\n"
       << "[result]\nseed = " << config.seed << "\ntrials = " << trials
       << "\nreference_not_found = " << summary.reference_not_found << "\n\n"
       << config_to_ini(config);
}

std::vector<std::filesystem::path> export_results(const std::vector<TrialRecord>& records, const Summary& summary,
                                                  const ScenarioConfig& config, const std::optional<DopplerResult>& doppler,
                                                  const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw Error("export: cannot create output directory " + out_dir.string());

    std::vector<std::filesystem::path> written;
    written.push_back(write_file(out_dir / "trials.csv", [&](std::ostream& os) { write_trials_csv(records, os); }));
    written.push_back(write_file(out_dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(summary, os); }));
    for (const char* metric : {"sync_error_s", "localization_error_m", "aoa_error_rad"})
        written.push_back(write_file(out_dir / (std::string("cdf_") + metric + ".csv"),
                                     [&](std::ostream& os) { write_cdf_csv(summary, metric, os); }));
    if (doppler) {
        written.push_back(write_file(out_dir / "doppler_calibrated.csv",
                                     [&](std::ostream& os) { write_doppler_csv(doppler->calibrated, os); }));
        written.push_back(
            write_file(out_dir / "doppler_raw.csv", [&](std::ostream& os) { write_doppler_csv(doppler->raw, os); }));
    }
    written.push_back(write_file(out_dir / "manifest.ini", [&](std::ostream& os) { write_manifest(config, summary, os); }));
    return written;
}

} // namespace refcal::harness
