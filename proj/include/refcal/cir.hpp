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

#include "refcal/signal_model.hpp"
#include "refcal/tensor.hpp"

namespace refcal {

/// Delay-domain view of a CSI tensor: (antenna p, symbol m, delay bin u).
struct CirTensor {
    ComplexGrid3 data;
    double bin_duration_s = 0.0;  ///< delta = 1/(spacing * U)
    std::size_t fft_size = 0;     ///< U

    std::size_t bins() const { return data.bins(); }
};

/// Peaks of a power-delay profile and the bins around them that are within 3 dB.
struct RegionOfInterest {
    std::vector<std::size_t> peak_bins;    ///< strongest first
    std::vector<std::size_t> member_bins;  ///< sorted, unique; includes every peak
    /// Set when fewer local maxima than requested were found.
    bool incomplete = false;

    bool empty() const { return member_bins.empty(); }
};

/// Q_p[m,u] = (1/U) sum_{n<N} H_p[m,n] exp(+j2pi u n / U). U must be a power of two >= N.
CirTensor compute_cir(const CsiTensor& csi, std::size_t fft_size, const OfdmGrid& grid);

/// (1/(P M)) sum_{p,m} |Q_p[m,u]|^2 for every bin u.
std::vector<double> magnitude_profile(const CirTensor& cir);

/// (1/M) sum_m |Q_p[m,u]|^2 for a single antenna.
std::vector<double> antenna_power_profile(const CirTensor& cir, std::size_t antenna);

/// Picks the `num_peaks` strongest local maxima of a circular profile. Each peak owns the
/// contiguous run of neighbours whose power is at least half the peak power. Equal peaks
/// resolve to the lower bin index.
RegionOfInterest find_region_of_interest(const std::vector<double>& profile, std::size_t num_peaks = 2);

} // namespace refcal
