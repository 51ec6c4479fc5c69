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
#include <span>
#include <vector>

#include "refcal/cir.hpp"
#include "refcal/signal_model.hpp"

namespace refcal {

struct RangeEstimate {
    std::size_t tap_bin = 0;
    double delay_s = 0.0;   ///< refined delay
    double range_m = 0.0;   ///< c * delay
    /// False when the tap had no usable neighbours and the bin centre was returned.
    bool refined = true;
};

/// Three-point parabolic interpolation on the log power profile around `tap`.
RangeEstimate estimate_delay(std::span<const double> power_profile, std::size_t tap, double bin_duration_s);

/// Same, on the antenna/symbol-averaged profile of a calibrated CIR.
RangeEstimate estimate_delay(const CirTensor& cir, std::size_t tap);

enum class DopplerWindow { rectangular, hann };
enum class DopplerCombine { antenna0, noncoherent };

struct DopplerOptions {
    DopplerWindow window = DopplerWindow::hann;
    /// Bins with |k| < notch_bins are removed. Any nonzero value also subtracts the
    /// slow-time mean before windowing so static paths do not leak through the window.
    std::size_t notch_bins = 1;
    DopplerCombine combine = DopplerCombine::noncoherent;
};

/// Delay x Doppler power map. Doppler bins run from -K/2 upwards (zero Doppler centred).
struct DopplerMap {
    std::size_t delay_bins = 0;
    std::size_t doppler_bins = 0;
    std::vector<double> power;           ///< delay-major, delay_bins x doppler_bins
    std::vector<double> doppler_axis_hz;
    double doppler_resolution_hz = 0.0;
    double bin_duration_s = 0.0;

    double at(std::size_t u, std::size_t k) const { return power[u * doppler_bins + k]; }
};

/// Slow-time DFT per delay bin over the concatenated symbols of `frames`.
DopplerMap doppler_map(std::span<const CirTensor> frames, double symbol_interval_s, const DopplerOptions& options = {});

struct DopplerPeak {
    std::size_t delay_bin = 0;
    std::size_t doppler_bin = 0;
    double doppler_hz = 0.0;
    double power = 0.0;
    /// Median power of the peak's delay row.
    double floor = 0.0;
    double peak_to_floor_db = 0.0;
};

DopplerPeak find_doppler_peak(const DopplerMap& map);

/// Fraction of the map energy at zero Doppler.
double zero_doppler_energy_fraction(const DopplerMap& map);

using Position2D = Vec2;

/// Intersects the bistatic range ellipse with the AoA ray from the receiver:
/// target = rx + r*u, r = (L^2 - D^2) / (2 (L + d.u)), d = rx - tx, D = |d|.
Position2D localize(double bistatic_range_m, double aoa_rad, const SceneGeometry& scene);
Position2D localize(const RangeEstimate& range, double aoa_rad, const SceneGeometry& scene);

/// |L_est - c*tau_true| / c.
double sync_error(double estimated_range_m, const PathSpec& truth);

} // namespace refcal
