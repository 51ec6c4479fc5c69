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

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "refcal/estimators.hpp"
#include "refcal/harness/config.hpp"

namespace refcal::harness {

struct TrialRecord {
    std::size_t trial_id = 0;
    double snr_db = 0.0;  ///< +inf for noiseless runs
    bool reference_found = false;
    std::string reference_kind;  ///< "los" or "reflector" when found
    std::size_t placement = 0;
    double sync_error_s = 0.0;
    double localization_error_m = 0.0;
    double aoa_error_rad = 0.0;
    /// Empty on success, otherwise the reason the trial produced no estimate.
    std::string failure;
    std::vector<std::string> warnings;

    bool ok() const { return failure.empty(); }
};

/// Independent generator for (seed, stream); trial t uses stream t.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream);

/// Target positions drawn from the configured region, away from the reference paths.
/// Depends only on the seed and the placement settings.
std::vector<Vec2> target_placements(const ScenarioConfig& config);

/// One Monte-Carlo trial at one SNR: synthesize, impair, add noise, calibrate, estimate.
/// Pipeline failures are recorded in the result rather than thrown.
TrialRecord run_trial(const ScenarioConfig& config, const std::vector<Vec2>& placements, std::size_t trial_id,
                      double snr_db);

/// All trials for every configured SNR, ordered by (SNR, trial id).
std::vector<TrialRecord> run_scenario(const ScenarioConfig& config);

struct DopplerResult {
    DopplerMap calibrated;
    DopplerMap raw;
    DopplerPeak calibrated_peak;
    DopplerPeak raw_peak;
    double target_doppler_hz = 0.0;
    std::size_t frames_calibrated = 0;
};

/// Synthesizes `window_frames` consecutive frames of `paths`, calibrates every frame on its own
/// and builds Doppler maps of the calibrated and the uncalibrated CIRs.
DopplerResult doppler_experiment(const ScenePaths& paths, const SceneGeometry& scene, const ScenarioConfig& config,
                                 double snr_db, std::uint64_t seed);

/// doppler_experiment() on the configured scene with the first target placement moving at
/// targets.velocity_mps.
DopplerResult run_doppler(const ScenarioConfig& config);

} // namespace refcal::harness
