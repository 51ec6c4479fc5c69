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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "refcal/calibration.hpp"
#include "refcal/estimators.hpp"
#include "refcal/signal_model.hpp"

namespace refcal::harness {

inline constexpr int kSchemaVersion = 1;

/// Where evaluation targets are placed. Placement i is used by every trial with id % placements == i.
struct TargetPlacement {
    std::size_t placements = 10;
    std::array<double, 2> region_x_m{-6.0, 0.0};
    std::array<double, 2> region_y_m{3.0, 8.0};
    double gain = 0.5;
    Vec2 velocity_mps{};
    /// Placements closer than this to the reference in bistatic range are redrawn.
    double min_range_separation_m = 1.5;
    /// ... and so are placements whose AoA is this close to a reference AoA.
    double min_aoa_separation_deg = 10.0;
};

struct DopplerSettings {
    bool enabled = false;
    std::size_t window_frames = 4;
    DopplerOptions options{};
};

/// Everything a run needs. Loaded from an INI file with explicit units in the key names:
///
///   [meta]        schema_version (= 1, required), name
///   [grid]        num_rs_subcarriers, rs_spacing_hz, num_rs_symbols, rs_interval_s, carrier_frequency_hz
///   [array]       num_antennas, spacing_wavelengths
///   [scene]       tx_position_m, rx_position_m, rx_normal, los_blocked, los_gain,
///                 reflector_position_m, reflector_gain
///   [targets]     placements, region_x_m, region_y_m, gain, velocity_mps,
///                 min_range_separation_m, min_aoa_separation_deg
///   [impairments] cfo_residual_hz, phase_jitter, sto_max_s, sto_integer_bins
///   [processing]  ifft_size, angle_step_deg, num_peaks, aoa_tolerance_deg, weak_reference_db,
///                 reference_variation_threshold
///   [run]         num_trials, seed, snr_db (comma list), no_noise
///   [doppler]     enabled, window_frames, window (hann|rectangular), notch_bins,
///                 combine (noncoherent|antenna0)
///
/// Vectors are written "x, y". Every key is optional except schema_version; unknown
/// sections and keys are rejected.
struct ScenarioConfig {
    int schema_version = kSchemaVersion;
    std::string name = "scenario";

    OfdmGrid grid{};
    std::size_t num_antennas = 8;
    double spacing_wavelengths = 0.5;

    SceneGeometry scene{};
    TargetPlacement targets{};
    ImpairmentModel impairments{.cfo_residual_hz = 2.0, .phase_jitter = 1.0, .sto_max_s = 20e-9};

    std::size_t fft_size = 1024;
    double angle_step_deg = 0.5;
    std::size_t num_peaks = 2;
    double aoa_tolerance_deg = 3.0;
    double weak_reference_db = 10.0;
    double reference_variation_threshold = 0.1;

    std::size_t num_trials = 200;
    std::uint64_t seed = 1;
    std::vector<double> snr_db{20.0};
    bool no_noise = false;

    DopplerSettings doppler{};

    ArrayGeometry array() const;
    CalibrationOptions calibration_options() const;
    /// Throws ConfigError naming the offending "section.key".
    void validate() const;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

/// INI text that parse_config() reads back into an equal config.
std::string config_to_ini(const ScenarioConfig& config);

} // namespace refcal::harness
