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

#include "refcal/sto_alignment.hpp"

#include <algorithm>

#include "refcal/error.hpp"

namespace refcal {

double ShiftEstimate::relative_sto_s(std::size_t p) const
{
    auto s = static_cast<double>(shifts_bins.at(p));
    if (s > static_cast<double>(fft_size) / 2.0) s -= static_cast<double>(fft_size);
    return s * bin_duration_s;
}

namespace {

template <typename T, typename Mag>
double relevance_impl(std::span<const T> ref, std::span<const T> other, const RegionOfInterest& roi,
                      std::size_t shift, Mag mag)
{
    if (roi.empty()) throw EstimationError("relevance: empty region of interest");
    const std::size_t U = ref.size();
    if (other.size() != U) throw EstimationError("relevance: CIR lengths differ");
    if (shift >= U) throw EstimationError("relevance: shift outside [0, U)");

    double sum = 0.0;
    for (std::size_t u : roi.member_bins) sum += mag(ref[u]) * mag(other[(u + shift) % U]);
    return sum;
}

} // namespace

double relevance(std::span<const cd> cir_ref, std::span<const cd> cir_p, const RegionOfInterest& roi,
                 std::size_t shift)
{
    return relevance_impl(cir_ref, cir_p, roi, shift, [](cd v) { return std::abs(v); });
}

double relevance(std::span<const double> mag_ref, std::span<const double> mag_p, const RegionOfInterest& roi,
                 std::size_t shift)
{
    return relevance_impl(mag_ref, mag_p, roi, shift, [](double v) { return std::abs(v); });
}

std::vector<double> mean_magnitude(const CirTensor& cir, std::size_t antenna)
{
    const auto& q = cir.data;
    std::vector<double> mag(q.bins(), 0.0);
    for (std::size_t m = 0; m < q.symbols(); ++m) {
        const auto row = q.row(antenna, m);
        for (std::size_t u = 0; u < row.size(); ++u) mag[u] += std::abs(row[u]);
    }
    for (auto& v : mag) v /= static_cast<double>(q.symbols());
    return mag;
}

ShiftEstimate estimate_relative_sto(const CirTensor& cir, const RegionOfInterest& roi)
{
    const std::size_t P = cir.data.antennas();
    const std::size_t U = cir.bins();
    if (P < 2) throw EstimationError("estimate_relative_sto: need at least 2 antennas");
    if (roi.empty()) throw EstimationError("estimate_relative_sto: empty region of interest");

    ShiftEstimate est;
    est.shifts_bins.assign(P, 0);
    est.relevance_scores.assign(P, 0.0);
    est.bin_duration_s = cir.bin_duration_s;
    est.fft_size = U;

    const auto ref = mean_magnitude(cir, 0);
    for (std::size_t p = 0; p < P; ++p) {
        const auto mag = p == 0 ? ref : mean_magnitude(cir, p);
        if (std::ranges::all_of(mag, [](double v) { return v == 0.0; }))
            throw EstimationError("estimate_relative_sto: antenna " + std::to_string(p) + " has an all-zero CIR");
        if (p == 0) {
            est.relevance_scores[0] = relevance(std::span<const double>(ref), std::span<const double>(ref), roi, 0);
            continue;
        }

        std::size_t best_slide = 0;
        double best = -1.0;
        for (std::size_t s = 0; s < U; ++s) {
            const double r = relevance(std::span<const double>(ref), std::span<const double>(mag), roi, s);
            if (r > best) {
                best = r;
                best_slide = s;
            }
        }
        est.shifts_bins[p] = (U - best_slide) % U;
        est.relevance_scores[p] = best;
    }
    return est;
}

CsiTensor compensate_relative_sto(const CsiTensor& csi, const ShiftEstimate& est, const OfdmGrid& grid)
{
    const auto& h = csi.data;
    if (est.shifts_bins.size() != h.antennas())
        throw ConfigError("compensate_relative_sto: shift estimate does not match the antenna count");

    CsiTensor out{h, CsiKind::aligned};
    std::vector<cd> ramp(h.bins());
    for (std::size_t p = 0; p < h.antennas(); ++p) {
        const double delta = static_cast<double>(est.shifts_bins[p]) * est.bin_duration_s;
        for (std::size_t n = 0; n < ramp.size(); ++n)
            ramp[n] = std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * grid.subcarrier_spacing_hz * delta);
        for (std::size_t m = 0; m < h.symbols(); ++m) {
            auto row = out.data.row(p, m);
            for (std::size_t n = 0; n < row.size(); ++n) row[n] *= ramp[n];
        }
    }
    return out;
}

} // namespace refcal
