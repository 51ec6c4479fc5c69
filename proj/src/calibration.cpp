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

#include "refcal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "refcal/error.hpp"

namespace refcal {

void ReferenceInfo::validate() const
{
    if (!(range_m > 0.0)) throw ConfigError("reference: known range must be > 0");
    if (!(tolerance_rad > 0.0)) throw ConfigError("reference: AoA tolerance must be > 0");
}

std::vector<ReferenceInfo> reference_candidates(const SceneGeometry& scene, double tolerance_rad)
{
    std::vector<ReferenceInfo> out;
    out.push_back({norm(scene.tx - scene.rx), aoa_from_normal(scene.rx_normal, scene.tx - scene.rx), tolerance_rad,
                   PathKind::los});
    if (scene.reference_reflector) {
        const Vec2 r = *scene.reference_reflector;
        out.push_back({bistatic_range(scene.tx, scene.rx, r), aoa_from_normal(scene.rx_normal, r - scene.rx),
                       tolerance_rad, PathKind::reflector});
    }
    return out;
}

ReferenceMatch identify_reference(std::span<const AoaEstimate> taps, const ReferenceInfo& ref)
{
    ref.validate();
    if (taps.empty()) throw ReferenceNotFound("identify_reference: no delay taps to match");

    const AoaEstimate* best = nullptr;
    double best_residual = 0.0;
    for (const auto& tap : taps) {
        const double residual = std::abs(tap.aoa_rad - ref.aoa_rad);
        if (!best || residual < best_residual) {
            best = &tap;
            best_residual = residual;
        }
    }
    if (best_residual > ref.tolerance_rad) {
        std::ostringstream os;
        os << "reference not found: closest tap AoA " << rad2deg(best->aoa_rad) << " deg is "
           << rad2deg(best_residual) << " deg from the expected " << rad2deg(ref.aoa_rad) << " deg";
        throw ReferenceNotFound(os.str());
    }
    return {best->tap_bin, best->aoa_rad, best_residual, 0};
}

ReferenceMatch identify_reference(std::span<const AoaEstimate> taps, std::span<const ReferenceInfo> candidates)
{
    if (candidates.empty()) throw ReferenceNotFound("identify_reference: no reference candidates");
    std::string reasons;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        try {
            auto match = identify_reference(taps, candidates[i]);
            match.candidate = i;
            return match;
        } catch (const ReferenceNotFound& e) {
            reasons += reasons.empty() ? e.what() : std::string("; ") + e.what();
        }
    }
    throw ReferenceNotFound(reasons);
}

ComplexMatrix extract_reference_response(const CirTensor& aligned_cir, std::size_t u_r, double weak_floor_db)
{
    const auto& q = aligned_cir.data;
    if (u_r >= q.bins()) throw EstimationError("extract_reference_response: tap outside [0, U)");

    auto profile = magnitude_profile(aligned_cir);
    const double tap_power = profile[u_r];
    std::nth_element(profile.begin(), profile.begin() + static_cast<std::ptrdiff_t>(profile.size() / 2), profile.end());
    const double floor = profile[profile.size() / 2];
    if (!(tap_power > 0.0) || (floor > 0.0 && 10.0 * std::log10(tap_power / floor) < weak_floor_db)) {
        std::ostringstream os;
        os << "weak reference: tap " << u_r << " is " << (floor > 0.0 && tap_power > 0.0 ? 10.0 * std::log10(tap_power / floor) : 0.0)
           << " dB above the median CIR floor (need " << weak_floor_db << " dB)";
        throw WeakReference(os.str());
    }

    ComplexMatrix out(q.antennas(), q.symbols());
    for (std::size_t p = 0; p < q.antennas(); ++p)
        for (std::size_t m = 0; m < q.symbols(); ++m)
            out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(m)) = q(p, m, u_r);
    return out;
}

double reference_variation(const ComplexMatrix& reference_response)
{
    const Eigen::MatrixXd mag = reference_response.cwiseAbs();
    if (mag.rows() == 0 || mag.cols() == 0) return 0.0;
    double total = 0.0;
    for (Eigen::Index p = 0; p < mag.rows(); ++p) {
        const double mean = mag.row(p).mean();
        if (mean == 0.0) continue;
        const double var = (mag.row(p).array() - mean).square().mean();
        total += std::sqrt(var) / mean;
    }
    return total / static_cast<double>(mag.rows());
}

CsiTensor divide_calibrate(const CsiTensor& aligned, const ComplexMatrix& reference_response,
                           const ReferenceInfo& ref, std::size_t u_r, double bin_duration_s, const OfdmGrid& grid)
{
    const auto& h = aligned.data;
    if (static_cast<std::size_t>(reference_response.rows()) != h.antennas() ||
        static_cast<std::size_t>(reference_response.cols()) != h.symbols())
        throw ConfigError("divide_calibrate: reference response shape does not match the CSI");

    // tau_ref - u_r*delta is the STO left in every antenna after relative alignment.
    const double residual_sto = ref.delay_s() - static_cast<double>(u_r) * bin_duration_s;
    std::vector<cd> ramp(h.bins());
    for (std::size_t n = 0; n < ramp.size(); ++n)
        ramp[n] = std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * grid.subcarrier_spacing_hz * residual_sto);

    CsiTensor out{h, CsiKind::calibrated};
    for (std::size_t p = 0; p < h.antennas(); ++p) {
        for (std::size_t m = 0; m < h.symbols(); ++m) {
            const cd r = reference_response(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(m));
            const double mag = std::abs(r);
            if (!(mag > 0.0))
                throw WeakReference("divide_calibrate: reference response vanishes at antenna " + std::to_string(p) +
                                    ", symbol " + std::to_string(m));
            const cd unit_conj = std::conj(r) / mag;
            auto row = out.data.row(p, m);
            for (std::size_t n = 0; n < row.size(); ++n) row[n] *= ramp[n] * unit_conj;
        }
    }
    return out;
}

CsiTensor reconstruct_steering(const CsiTensor& divided, double reference_aoa_rad, const ArrayGeometry& geom)
{
    const auto a = steering_vector(reference_aoa_rad, geom);
    if (a.size() != divided.data.antennas())
        throw ConfigError("reconstruct_steering: array size does not match the CSI");
    CsiTensor out{divided.data, CsiKind::calibrated};
    for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t m = 0; m < out.data.symbols(); ++m)
            for (auto& v : out.data.row(p, m)) v *= a[p];
    return out;
}

CalibrationResult calibrate(const CsiTensor& raw, std::span<const ReferenceInfo> candidates, const OfdmGrid& grid,
                            const ArrayGeometry& geom, const CalibrationOptions& options)
{
    CalibrationResult res;

    const CirTensor raw_cir = compute_cir(raw, options.fft_size, grid);
    res.sto_roi = find_region_of_interest(antenna_power_profile(raw_cir, 0), options.num_peaks);
    res.shifts = estimate_relative_sto(raw_cir, res.sto_roi);
    res.aligned = compensate_relative_sto(raw, res.shifts, grid);

    res.aligned_cir = compute_cir(res.aligned, options.fft_size, grid);
    res.tap_roi = find_region_of_interest(magnitude_profile(res.aligned_cir), options.num_peaks);
    res.taps = estimate_taps_aoa(res.aligned_cir, res.tap_roi, geom, options.angle_grid);

    res.reference = identify_reference(res.taps, candidates);
    res.reference_info = candidates[res.reference.candidate];
    res.reference_response = extract_reference_response(res.aligned_cir, res.reference.tap_bin, options.weak_reference_db);

    const double variation = reference_variation(res.reference_response);
    if (variation > options.variation_threshold) {
        std::ostringstream os;
        os << "reference tap " << res.reference.tap_bin << " magnitude varies by " << variation
           << " over symbols; a dynamic path may overlap the reference";
        res.warnings.push_back(os.str());
    }

    const CsiTensor divided = divide_calibrate(res.aligned, res.reference_response, res.reference_info,
                                               res.reference.tap_bin, res.aligned_cir.bin_duration_s, grid);
    res.calibrated = reconstruct_steering(divided, res.reference_info.aoa_rad, geom);
    return res;
}

} // namespace refcal
