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

#include "refcal/harness/scenario.hpp"

#include <cmath>

#include "refcal/calibration.hpp"
#include "refcal/cir.hpp"
#include "refcal/error.hpp"

namespace refcal::harness {

namespace {

constexpr std::uint64_t kPlacementStream = 0xF1AC'E000'0000'0001ULL;
constexpr std::uint64_t kDopplerStream = 0xD0DD'1E00'0000'0001ULL;

ImpairmentModel impairment_model(const ScenarioConfig& config)
{
    ImpairmentModel model = config.impairments;
    model.fft_size = config.fft_size;
    return model;
}

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t U)
{
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, U - d);
}

const char* kind_name(PathKind kind)
{
    switch (kind) {
    case PathKind::los: return "los";
    case PathKind::reflector: return "reflector";
    case PathKind::target: return "target";
    }
    return "unknown";
}

} // namespace

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

std::vector<Vec2> target_placements(const ScenarioConfig& config)
{
    const auto& t = config.targets;
    const auto refs = reference_candidates(config.scene, deg2rad(config.aoa_tolerance_deg));
    const double max_range = 0.95 * kSpeedOfLight * config.grid.unambiguous_delay();
    const double baseline = norm(config.scene.rx - config.scene.tx);

    auto rng = stream_rng(config.seed, kPlacementStream);
    std::uniform_real_distribution<double> ux(t.region_x_m[0], std::nextafter(t.region_x_m[1], INFINITY));
    std::uniform_real_distribution<double> uy(t.region_y_m[0], std::nextafter(t.region_y_m[1], INFINITY));

    std::vector<Vec2> out;
    const std::size_t max_attempts = 10'000 * t.placements;
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < t.placements; ++attempt) {
        const Vec2 pos{ux(rng), uy(rng)};
        const double range = bistatic_range(config.scene.tx, config.scene.rx, pos);
        const double aoa = aoa_from_normal(config.scene.rx_normal, pos - config.scene.rx);
        if (!(range > baseline + 0.1) || range > max_range || std::abs(aoa) > deg2rad(85.0)) continue;
        bool clear = true;
        for (const auto& ref : refs)
            if (std::abs(range - ref.range_m) < t.min_range_separation_m ||
                std::abs(aoa - ref.aoa_rad) < deg2rad(t.min_aoa_separation_deg))
                clear = false;
        if (clear) out.push_back(pos);
    }
    if (out.size() < t.placements)
        throw ConfigError("targets: could not place " + std::to_string(t.placements) +
                          " targets in the region away from the reference paths");
    return out;
}

TrialRecord run_trial(const ScenarioConfig& config, const std::vector<Vec2>& placements, std::size_t trial_id,
                      double snr_db)
{
    TrialRecord rec;
    rec.trial_id = trial_id;
    rec.snr_db = config.no_noise ? kNoNoise : snr_db;
    rec.placement = trial_id % placements.size();
    rec.sync_error_s = rec.localization_error_m = rec.aoa_error_rad = std::nan("");

    auto rng = stream_rng(config.seed, trial_id);
    std::uniform_real_distribution<double> phase(-kPi, kPi);

    SceneGeometry scene = config.scene;
    scene.los_gain *= std::polar(1.0, phase(rng));
    scene.reflector_gain *= std::polar(1.0, phase(rng));
    scene.targets = {Target{placements[rec.placement], config.targets.velocity_mps,
                            std::polar(config.targets.gain, phase(rng))}};

    const ArrayGeometry geom = config.array();
    const ImpairmentSpec imp = draw_impairments(impairment_model(config), config.grid, geom.num_antennas, rng);
    const std::uint64_t noise_seed = rng();

    try {
        const ScenePaths paths = scene_to_paths(scene, config.grid);
        const CsiTensor raw = add_noise(apply_impairments(ideal_csi(paths.paths, config.grid, geom), imp, config.grid),
                                        rec.snr_db, noise_seed);

        const auto candidates = reference_candidates(scene, deg2rad(config.aoa_tolerance_deg));
        const auto options = config.calibration_options();
        CalibrationResult cal;
        try {
            cal = calibrate(raw, candidates, config.grid, geom, options);
        } catch (const ReferenceNotFound& e) {
            rec.failure = e.what();
            return rec;
        } catch (const WeakReference& e) {
            rec.failure = e.what();
            return rec;
        }
        rec.reference_found = true;
        rec.reference_kind = kind_name(cal.reference_info.kind);
        rec.warnings = cal.warnings;

        const CirTensor cir = compute_cir(cal.calibrated, config.fft_size, config.grid);
        const auto profile = magnitude_profile(cir);
        const auto roi = find_region_of_interest(profile, config.num_peaks);
        const std::size_t U = cir.bins();
        const auto expected_ref =
            static_cast<std::size_t>(std::llround(cal.reference_info.delay_s() / cir.bin_duration_s)) % U;

        std::size_t ref_peak = roi.peak_bins.front();
        for (std::size_t u : roi.peak_bins)
            if (circular_distance(u, expected_ref, U) < circular_distance(ref_peak, expected_ref, U)) ref_peak = u;
        std::optional<std::size_t> target_tap;
        for (std::size_t u : roi.peak_bins)
            if (u != ref_peak) {
                target_tap = u;
                break;
            }
        if (!target_tap) {
            rec.failure = "target not detected in the calibrated CIR";
            return rec;
        }

        const auto range = estimate_delay(profile, *target_tap, cir.bin_duration_s);
        const auto aoa = music_spectrum(extract_tap_snapshots(cir, *target_tap), geom, options.angle_grid, 1);
        const PathSpec& truth = paths.paths[paths.target_indices.front()];

        rec.sync_error_s = sync_error(range.range_m, truth);
        rec.aoa_error_rad = std::abs(aoa.aoa_rad - truth.aoa_rad);
        const Position2D pos = localize(range, aoa.aoa_rad, scene);
        rec.localization_error_m = norm(pos - scene.targets.front().position);
        if (!range.refined) rec.warnings.push_back("target delay not refined (edge bin)");
    } catch (const Error& e) {
        if (rec.failure.empty()) rec.failure = e.what();
    }
    return rec;
}

std::vector<TrialRecord> run_scenario(const ScenarioConfig& config)
{
    config.validate();
    const auto placements = target_placements(config);
    std::vector<TrialRecord> records;
    const std::vector<double> snrs = config.no_noise ? std::vector<double>{kNoNoise} : config.snr_db;
    records.reserve(snrs.size() * config.num_trials);
    for (double snr : snrs)
        for (std::size_t t = 0; t < config.num_trials; ++t) records.push_back(run_trial(config, placements, t, snr));
    return records;
}

DopplerResult doppler_experiment(const ScenePaths& paths, const SceneGeometry& scene, const ScenarioConfig& config,
                                 double snr_db, std::uint64_t seed)
{
    const std::size_t frames = config.doppler.window_frames;
    const std::size_t M = config.grid.num_symbols;
    OfdmGrid window_grid = config.grid;
    window_grid.num_symbols = frames * M;

    const ArrayGeometry geom = config.array();
    std::mt19937_64 rng(seed);
    // The STO is held over the whole window, the per-symbol phase is not.
    const ImpairmentSpec imp = draw_impairments(impairment_model(config), window_grid, geom.num_antennas, rng);
    const CsiTensor window =
        add_noise(apply_impairments(ideal_csi(paths.paths, window_grid, geom), imp, window_grid), snr_db, rng());

    const auto candidates = reference_candidates(scene, deg2rad(config.aoa_tolerance_deg));
    const auto options = config.calibration_options();
    std::vector<CirTensor> calibrated;
    std::vector<CirTensor> uncalibrated;
    for (std::size_t f = 0; f < frames; ++f) {
        CsiTensor frame{ComplexGrid3(geom.num_antennas, M, config.grid.num_subcarriers), CsiKind::raw};
        for (std::size_t p = 0; p < geom.num_antennas; ++p)
            for (std::size_t m = 0; m < M; ++m) std::ranges::copy(window.data.row(p, f * M + m), frame.data.row(p, m).begin());

        const auto cal = calibrate(frame, candidates, config.grid, geom, options);
        calibrated.push_back(compute_cir(cal.calibrated, config.fft_size, config.grid));
        uncalibrated.push_back(compute_cir(frame, config.fft_size, config.grid));
    }

    DopplerResult res;
    res.frames_calibrated = frames;
    res.calibrated = doppler_map(calibrated, config.grid.symbol_interval_s, config.doppler.options);
    res.raw = doppler_map(uncalibrated, config.grid.symbol_interval_s, config.doppler.options);
    res.calibrated_peak = find_doppler_peak(res.calibrated);
    res.raw_peak = find_doppler_peak(res.raw);
    if (!paths.target_indices.empty()) res.target_doppler_hz = paths.paths[paths.target_indices.front()].doppler_hz;
    return res;
}

DopplerResult run_doppler(const ScenarioConfig& config)
{
    config.validate();
    const auto placements = target_placements(config);
    SceneGeometry scene = config.scene;
    scene.targets = {Target{placements.front(), config.targets.velocity_mps, config.targets.gain}};
    const ScenePaths paths = scene_to_paths(scene, config.grid);
    const double snr = config.no_noise ? kNoNoise : config.snr_db.front();
    return doppler_experiment(paths, scene, config, snr, stream_rng(config.seed, kDopplerStream)());
}

} // namespace refcal::harness
