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
#include <vector>

#include <Eigen/Core>

#include "refcal/cir.hpp"
#include "refcal/signal_model.hpp"

namespace refcal {

using ComplexMatrix = Eigen::MatrixXcd;

/// Antenna x symbol snapshots of a single delay tap.
struct TapSnapshots {
    std::size_t tap_bin = 0;
    ComplexMatrix snapshots;  ///< P x M
};

struct AoaEstimate {
    std::size_t tap_bin = 0;
    double aoa_rad = 0.0;
    std::vector<double> spectrum;  ///< pseudo-spectrum over the angle grid
    double peak_value = 0.0;
};

/// Evenly spaced grid in degrees, converted to radians. Both ends included when they fall on the step.
std::vector<double> make_angle_grid(double min_deg, double max_deg, double step_deg);

/// (-90, 90) deg at 0.5 deg steps. The endfire angles are excluded, see steering_vector().
std::vector<double> default_angle_grid();

TapSnapshots extract_tap_snapshots(const CirTensor& cir, std::size_t tap);

/// MUSIC pseudo-spectrum 1/||E_n^H a(phi)||^2 from the sample covariance (1/M) sum_m x_m x_m^H.
/// The peak on the grid is returned; equal peaks resolve toward the smaller |phi|.
AoaEstimate music_spectrum(const TapSnapshots& snap, const ArrayGeometry& geom,
                           const std::vector<double>& angle_grid, std::size_t num_sources = 1);

/// One single-source MUSIC estimate per ROI peak, in ROI peak order.
std::vector<AoaEstimate> estimate_taps_aoa(const CirTensor& cir, const RegionOfInterest& roi,
                                           const ArrayGeometry& geom, const std::vector<double>& angle_grid);

} // namespace refcal
