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

/// Relative STO of every antenna to antenna 0, in CIR bins.
///
/// shifts_bins[p] = (sto_p - sto_0) / delta mod U. A positive STO moves a CIR towards
/// earlier bins, so this is the circular slide that brings antenna 0 onto antenna p.
struct ShiftEstimate {
    std::vector<std::size_t> shifts_bins;
    std::vector<double> relevance_scores;
    double bin_duration_s = 0.0;
    std::size_t fft_size = 0;

    /// Relative STO in seconds, taken in (-U/2, U/2] bins.
    double relative_sto_s(std::size_t p) const;
};

/// sum_{u in ROI} |ref[u]| * |other[(u + shift) mod U]|
double relevance(std::span<const cd> cir_ref, std::span<const cd> cir_p, const RegionOfInterest& roi,
                 std::size_t shift);

/// Magnitude form of relevance(), used on symbol-averaged magnitude CIRs.
double relevance(std::span<const double> mag_ref, std::span<const double> mag_p, const RegionOfInterest& roi,
                 std::size_t shift);

/// Symbol-averaged magnitude CIR of one antenna: (1/M) sum_m |Q_p[m,u]|.
std::vector<double> mean_magnitude(const CirTensor& cir, std::size_t antenna);

/// Exhaustive circular search over all U shifts of every antenna against antenna 0.
/// Ties resolve to the smallest slide. Throws EstimationError for an all-zero antenna.
ShiftEstimate estimate_relative_sto(const CirTensor& cir, const RegionOfInterest& roi);

/// H~_p[m,n] = H^_p[m,n] exp(-j2pi n df shift_p delta). Leaves the STO of antenna 0 in every antenna.
CsiTensor compensate_relative_sto(const CsiTensor& csi, const ShiftEstimate& est, const OfdmGrid& grid);

} // namespace refcal
