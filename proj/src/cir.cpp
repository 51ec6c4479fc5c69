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

#include "refcal/cir.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "fft.hpp"
#include "refcal/error.hpp"

namespace refcal {

CirTensor compute_cir(const CsiTensor& csi, std::size_t fft_size, const OfdmGrid& grid)
{
    const auto& h = csi.data;
    if (fft_size < h.bins())
        throw ConfigError("compute_cir: IFFT size " + std::to_string(fft_size) + " is smaller than the " +
                          std::to_string(h.bins()) + " subcarriers");
    if (!std::has_single_bit(fft_size)) throw ConfigError("compute_cir: IFFT size must be a power of two");

    CirTensor cir{ComplexGrid3(h.antennas(), h.symbols(), fft_size),
                  1.0 / (grid.subcarrier_spacing_hz * static_cast<double>(fft_size)), fft_size};
    for (std::size_t p = 0; p < h.antennas(); ++p)
        for (std::size_t m = 0; m < h.symbols(); ++m) std::ranges::copy(h.row(p, m), cir.data.row(p, m).begin());

    detail::dft_rows(cir.data.flat(), h.antennas() * h.symbols(), fft_size, detail::FftDirection::backward);
    const double scale = 1.0 / static_cast<double>(fft_size);
    for (auto& v : cir.data.flat()) v *= scale;
    return cir;
}

std::vector<double> magnitude_profile(const CirTensor& cir)
{
    const auto& q = cir.data;
    std::vector<double> profile(q.bins(), 0.0);
    for (std::size_t p = 0; p < q.antennas(); ++p)
        for (std::size_t m = 0; m < q.symbols(); ++m) {
            const auto row = q.row(p, m);
            for (std::size_t u = 0; u < row.size(); ++u) profile[u] += std::norm(row[u]);
        }
    const auto count = static_cast<double>(q.antennas() * q.symbols());
    if (count > 0)
        for (auto& v : profile) v /= count;
    return profile;
}

std::vector<double> antenna_power_profile(const CirTensor& cir, std::size_t antenna)
{
    const auto& q = cir.data;
    if (antenna >= q.antennas()) throw EstimationError("antenna_power_profile: antenna index out of range");
    std::vector<double> profile(q.bins(), 0.0);
    for (std::size_t m = 0; m < q.symbols(); ++m) {
        const auto row = q.row(antenna, m);
        for (std::size_t u = 0; u < row.size(); ++u) profile[u] += std::norm(row[u]);
    }
    if (q.symbols() > 0)
        for (auto& v : profile) v /= static_cast<double>(q.symbols());
    return profile;
}

RegionOfInterest find_region_of_interest(const std::vector<double>& profile, std::size_t num_peaks)
{
    const std::size_t U = profile.size();
    if (U < 3) throw EstimationError("find_region_of_interest: profile needs at least 3 bins");
    if (num_peaks == 0) throw EstimationError("find_region_of_interest: num_peaks must be >= 1");

    auto prev = [U](std::size_t u) { return (u + U - 1) % U; };
    auto next = [U](std::size_t u) { return (u + 1) % U; };

    std::vector<std::size_t> candidates;
    for (std::size_t u = 0; u < U; ++u)
        if (profile[u] >= profile[prev(u)] && profile[u] >= profile[next(u)]) candidates.push_back(u);
    std::ranges::stable_sort(candidates, [&](std::size_t a, std::size_t b) { return profile[a] > profile[b]; });

    RegionOfInterest roi;
    std::set<std::size_t> members;
    for (std::size_t u : candidates) {
        if (roi.peak_bins.size() == num_peaks) break;
        // Plateau neighbours and shoulders of an accepted peak are not peaks of their own.
        if (members.contains(u)) continue;

        const double half = profile[u] / 2.0;
        members.insert(u);
        std::size_t visited = 1;
        for (std::size_t v = prev(u); visited < U && profile[v] >= half; v = prev(v), ++visited) members.insert(v);
        for (std::size_t v = next(u); visited < U && profile[v] >= half; v = next(v), ++visited) members.insert(v);
        roi.peak_bins.push_back(u);
    }
    roi.incomplete = roi.peak_bins.size() < num_peaks;
    roi.member_bins.assign(members.begin(), members.end());
    return roi;
}

} // namespace refcal
