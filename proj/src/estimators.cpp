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

#include "refcal/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fft.hpp"
#include "refcal/error.hpp"

namespace refcal {

RangeEstimate estimate_delay(std::span<const double> power_profile, std::size_t tap, double bin_duration_s)
{
    if (tap >= power_profile.size()) throw EstimationError("estimate_delay: tap outside the profile");

    RangeEstimate est;
    est.tap_bin = tap;
    double frac = 0.0;
    const bool has_neighbours = tap > 0 && tap + 1 < power_profile.size();
    if (has_neighbours && power_profile[tap - 1] > 0.0 && power_profile[tap] > 0.0 && power_profile[tap + 1] > 0.0) {
        const double l = std::log(power_profile[tap - 1]);
        const double c = std::log(power_profile[tap]);
        const double r = std::log(power_profile[tap + 1]);
        const double curvature = l - 2.0 * c + r;
        if (curvature < 0.0) frac = std::clamp(0.5 * (l - r) / curvature, -0.5, 0.5);
        else est.refined = false;
    } else {
        est.refined = false;
    }
    est.delay_s = (static_cast<double>(tap) + frac) * bin_duration_s;
    est.range_m = kSpeedOfLight * est.delay_s;
    return est;
}

RangeEstimate estimate_delay(const CirTensor& cir, std::size_t tap)
{
    const auto profile = magnitude_profile(cir);
    return estimate_delay(profile, tap, cir.bin_duration_s);
}

DopplerMap doppler_map(std::span<const CirTensor> frames, double symbol_interval_s, const DopplerOptions& options)
{
    if (frames.empty()) throw EstimationError("doppler_map: no frames");
    const std::size_t P = frames.front().data.antennas();
    const std::size_t U = frames.front().bins();
    std::size_t K = 0;
    for (const auto& f : frames) {
        if (f.data.antennas() != P || f.bins() != U) throw EstimationError("doppler_map: frame shapes differ");
        K += f.data.symbols();
    }
    if (K < 8) throw EstimationError("doppler_map: need at least 8 slow-time symbols, got " + std::to_string(K));
    if (!(symbol_interval_s > 0.0)) throw EstimationError("doppler_map: symbol interval must be > 0");

    std::vector<double> window(K, 1.0);
    if (options.window == DopplerWindow::hann)
        for (std::size_t k = 0; k < K; ++k)
            window[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(K - 1));

    const std::size_t used_antennas = options.combine == DopplerCombine::antenna0 ? 1 : P;
    // One slow-time row per (antenna, delay bin).
    std::vector<cd> rows(used_antennas * U * K);
    for (std::size_t p = 0; p < used_antennas; ++p) {
        for (std::size_t u = 0; u < U; ++u) {
            cd* row = rows.data() + (p * U + u) * K;
            std::size_t k = 0;
            for (const auto& f : frames)
                for (std::size_t m = 0; m < f.data.symbols(); ++m) row[k++] = f.data(p, m, u);
            if (options.notch_bins > 0) {
                const cd mean = std::accumulate(row, row + K, cd{}) / static_cast<double>(K);
                for (std::size_t i = 0; i < K; ++i) row[i] -= mean;
            }
            for (std::size_t i = 0; i < K; ++i) row[i] *= window[i];
        }
    }
    detail::dft_rows(rows, used_antennas * U, K, detail::FftDirection::forward);

    DopplerMap map;
    map.delay_bins = U;
    map.doppler_bins = K;
    map.power.assign(U * K, 0.0);
    map.doppler_resolution_hz = 1.0 / (static_cast<double>(K) * symbol_interval_s);
    map.bin_duration_s = frames.front().bin_duration_s;
    map.doppler_axis_hz.resize(K);
    const auto half = static_cast<std::ptrdiff_t>(K / 2);
    for (std::size_t j = 0; j < K; ++j)
        map.doppler_axis_hz[j] = static_cast<double>(static_cast<std::ptrdiff_t>(j) - half) * map.doppler_resolution_hz;

    for (std::size_t p = 0; p < used_antennas; ++p)
        for (std::size_t u = 0; u < U; ++u) {
            const cd* row = rows.data() + (p * U + u) * K;
            for (std::size_t j = 0; j < K; ++j) {
                // column j holds Doppler index j - K/2; DFT index is that modulo K
                const std::size_t dft_index = (j + K - K / 2) % K;
                map.power[u * K + j] += std::norm(row[dft_index]);
            }
        }

    if (options.notch_bins > 0) {
        for (std::size_t j = 0; j < K; ++j) {
            const auto offset = static_cast<std::size_t>(std::abs(static_cast<std::ptrdiff_t>(j) - half));
            if (offset < options.notch_bins)
                for (std::size_t u = 0; u < U; ++u) map.power[u * K + j] = 0.0;
        }
    }
    return map;
}

DopplerPeak find_doppler_peak(const DopplerMap& map)
{
    if (map.power.empty()) throw EstimationError("find_doppler_peak: empty map");
    const auto it = std::ranges::max_element(map.power);
    const auto index = static_cast<std::size_t>(it - map.power.begin());

    DopplerPeak peak;
    peak.delay_bin = index / map.doppler_bins;
    peak.doppler_bin = index % map.doppler_bins;
    peak.doppler_hz = map.doppler_axis_hz[peak.doppler_bin];
    peak.power = *it;

    std::vector<double> row(map.power.begin() + static_cast<std::ptrdiff_t>(peak.delay_bin * map.doppler_bins),
                            map.power.begin() + static_cast<std::ptrdiff_t>((peak.delay_bin + 1) * map.doppler_bins));
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(row.size() / 2), row.end());
    peak.floor = row[row.size() / 2];
    peak.peak_to_floor_db = peak.floor > 0.0 ? 10.0 * std::log10(peak.power / peak.floor)
                                             : std::numeric_limits<double>::infinity();
    return peak;
}

double zero_doppler_energy_fraction(const DopplerMap& map)
{
    const double total = std::accumulate(map.power.begin(), map.power.end(), 0.0);
    if (total == 0.0) return 0.0;
    const std::size_t zero = map.doppler_bins / 2;
    double dc = 0.0;
    for (std::size_t u = 0; u < map.delay_bins; ++u) dc += map.at(u, zero);
    return dc / total;
}

Position2D localize(double bistatic_range_m, double aoa_rad, const SceneGeometry& scene)
{
    const Vec2 d = scene.rx - scene.tx;
    const double D = norm(d);
    if (!(bistatic_range_m > D))
        throw GeometryError("localize: bistatic range must exceed the Tx-Rx baseline");
    const Vec2 u = direction_from_aoa(scene.rx_normal, aoa_rad);
    const double denom = 2.0 * (bistatic_range_m + dot(d, u));
    const double r = (bistatic_range_m * bistatic_range_m - D * D) / denom;
    if (!(denom > 0.0) || !(r > 0.0) || !std::isfinite(r))
        throw GeometryError("localize: AoA ray does not intersect the range ellipse in front of the receiver");
    return scene.rx + r * u;
}

Position2D localize(const RangeEstimate& range, double aoa_rad, const SceneGeometry& scene)
{
    return localize(range.range_m, aoa_rad, scene);
}

double sync_error(double estimated_range_m, const PathSpec& truth)
{
    return std::abs(estimated_range_m - kSpeedOfLight * truth.delay_s) / kSpeedOfLight;
}

} // namespace refcal
