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
#include <string>
#include <vector>

#include "refcal/aoa.hpp"
#include "refcal/cir.hpp"
#include "refcal/signal_model.hpp"
#include "refcal/sto_alignment.hpp"

namespace refcal {

/// Prior knowledge about a reference path: the LoS (Tx-Rx distance) or a deployed
/// reflector (Tx-reflector-Rx distance), plus its AoA at the receiver.
struct ReferenceInfo {
    double range_m = 0.0;
    double aoa_rad = 0.0;
    double tolerance_rad = deg2rad(3.0);
    PathKind kind = PathKind::los;

    double delay_s() const { return range_m / kSpeedOfLight; }
    void validate() const;
};

/// Reference candidates a receiver knows from deployment: the LoS first, then the
/// reflector when one is deployed.
std::vector<ReferenceInfo> reference_candidates(const SceneGeometry& scene, double tolerance_rad);

struct ReferenceMatch {
    std::size_t tap_bin = 0;       ///< u_r
    double matched_aoa_rad = 0.0;
    double residual_rad = 0.0;
    std::size_t candidate = 0;     ///< index into the candidate list that matched
};

/// Tap whose estimated AoA is closest to the reference AoA, if within tolerance.
/// Throws ReferenceNotFound otherwise.
ReferenceMatch identify_reference(std::span<const AoaEstimate> taps, const ReferenceInfo& ref);

/// Tries the candidates in order and returns the first match, so a visible LoS wins over a reflector.
ReferenceMatch identify_reference(std::span<const AoaEstimate> taps, std::span<const ReferenceInfo> candidates);

/// Q~_p[m,u_r] for every antenna and symbol (P x M), approximately exp(j theta_m) a_ref[p] b_ref.
/// Throws WeakReference when the tap power is less than `weak_floor_db` above the median of the profile.
ComplexMatrix extract_reference_response(const CirTensor& aligned_cir, std::size_t u_r, double weak_floor_db = 10.0);

/// Mean over antennas of std/mean of |Q~_p[m,u_r]| across symbols. Near zero for a static reference.
double reference_variation(const ComplexMatrix& reference_response);

/// H_div = H~ exp(-j2pi n df (tau_ref - u_r delta)) / (Q~[u_r] / |Q~[u_r]|).
/// Removes theta_m and the absolute STO; the steering vector of the reference is divided out.
CsiTensor divide_calibrate(const CsiTensor& aligned, const ComplexMatrix& reference_response,
                           const ReferenceInfo& ref, std::size_t u_r, double bin_duration_s, const OfdmGrid& grid);

/// H_calib = a_ref[p] * H_div.
CsiTensor reconstruct_steering(const CsiTensor& divided, double reference_aoa_rad, const ArrayGeometry& geom);

struct CalibrationOptions {
    std::size_t fft_size = 1024;
    std::size_t num_peaks = 2;
    std::vector<double> angle_grid = default_angle_grid();
    double weak_reference_db = 10.0;
    /// reference_variation() above this raises a warning (dynamic path on the reference tap).
    double variation_threshold = 0.1;
};

struct CalibrationResult {
    CsiTensor calibrated;
    CsiTensor aligned;
    CirTensor aligned_cir;
    RegionOfInterest sto_roi;
    ShiftEstimate shifts;
    RegionOfInterest tap_roi;
    std::vector<AoaEstimate> taps;
    ReferenceMatch reference;
    ReferenceInfo reference_info;
    ComplexMatrix reference_response;
    std::vector<std::string> warnings;
};

/// Full calibration of one frame of raw CSI: relative STO alignment, per-tap AoA,
/// reference identification, division and steering reconstruction.
CalibrationResult calibrate(const CsiTensor& raw, std::span<const ReferenceInfo> candidates, const OfdmGrid& grid,
                            const ArrayGeometry& geom, const CalibrationOptions& options = {});

} // namespace refcal
