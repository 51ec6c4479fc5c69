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

// refcal command line: runs Monte-Carlo calibration scenarios from an INI config.
//
//   refcal run <config> --out <dir> [--trials N] [--seed S] [--snr-db LIST] [--no-noise]
//   refcal config-template

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

#include "refcal/error.hpp"
#include "refcal/harness/config.hpp"
#include "refcal/harness/export.hpp"
#include "refcal/harness/scenario.hpp"
#include "refcal/harness/summary.hpp"

using namespace refcal;

namespace {

std::vector<double> parse_snr_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("--snr-db: bad value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("--snr-db: empty list");
    return out;
}

int run(const std::string& config_path, const std::string& out_dir, std::optional<std::size_t> trials,
        std::optional<std::uint64_t> seed, const std::string& snr_text, bool no_noise)
{
    auto config = harness::load_config(config_path);
    if (trials) config.num_trials = *trials;
    if (seed) config.seed = *seed;
    if (!snr_text.empty()) config.snr_db = parse_snr_list(snr_text);
    if (no_noise) config.no_noise = true;
    config.validate();

    std::cerr << "refcal: scenario '" << config.name << "', " << config.num_trials << " trials x "
              << (config.no_noise ? 1 : config.snr_db.size()) << " SNR point(s), seed " << config.seed << "\n";
    const auto records = harness::run_scenario(config);
    const auto summary = harness::summarize(records);

    std::optional<harness::DopplerResult> doppler;
    if (config.doppler.enabled) {
        std::cerr << "refcal: Doppler window of " << config.doppler.window_frames << " frames\n";
        doppler = harness::run_doppler(config);
    }

    for (const auto& m : summary.metrics)
        std::cerr << "  snr " << harness::format_double(m.snr_db) << " dB  " << m.metric << ": n=" << m.count
                  << " failed=" << m.failed << " mean=" << m.mean << " p80=" << m.p80 << " max=" << m.max << "\n";
    if (doppler)
        std::cerr << "  doppler peak " << doppler->calibrated_peak.doppler_hz << " Hz (target "
                  << doppler->target_doppler_hz << " Hz), peak/floor calibrated "
                  << doppler->calibrated_peak.peak_to_floor_db << " dB vs raw " << doppler->raw_peak.peak_to_floor_db
                  << " dB\n";

    const auto files = harness::export_results(records, summary, config, doppler, out_dir);
    std::cerr << "refcal: wrote " << files.size() << " files to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reference-path calibration for bistatic OFDM sensing"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::string snr_text;
    bool no_noise = false;

    auto* run_cmd = app.add_subcommand("run", "Run a Monte-Carlo scenario and export CSV results");
    run_cmd->add_option("config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out_dir, "Output directory")->required();
    run_cmd->add_option("--trials", trials, "Override run.num_trials")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", seed, "Override run.seed");
    run_cmd->add_option("--snr-db", snr_text, "Override run.snr_db (comma-separated list)");
    run_cmd->add_flag("--no-noise", no_noise, "Disable noise");

    app.add_subcommand("config-template", "Print a config with every key at its default value");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("config-template")) {
            std::cout << harness::config_to_ini(harness::ScenarioConfig{});
            return 0;
        }
        return run(config_path, out_dir, trials, seed, snr_text, no_noise);
    } catch (const ConfigError& e) {
        std::cerr << "refcal: configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "refcal: " << e.what() << "\n";
        return 1;
    }
}
