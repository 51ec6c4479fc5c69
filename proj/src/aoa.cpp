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

#include "refcal/aoa.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "refcal/error.hpp"

namespace refcal {

std::vector<double> make_angle_grid(double min_deg, double max_deg, double step_deg)
{
    if (!(step_deg > 0.0) || !(max_deg >= min_deg)) throw ConfigError("angle grid: need step > 0 and max >= min");
    const auto count = static_cast<std::size_t>(std::floor((max_deg - min_deg) / step_deg + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = deg2rad(min_deg + step_deg * static_cast<double>(i));
    return grid;
}

std::vector<double> default_angle_grid()
{
    return make_angle_grid(-89.5, 89.5, 0.5);
}

TapSnapshots extract_tap_snapshots(const CirTensor& cir, std::size_t tap)
{
    const auto& q = cir.data;
    if (tap >= q.bins()) throw EstimationError("extract_tap_snapshots: tap outside [0, U)");
    TapSnapshots snap{tap, ComplexMatrix(q.antennas(), q.symbols())};
    for (std::size_t p = 0; p < q.antennas(); ++p)
        for (std::size_t m = 0; m < q.symbols(); ++m)
            snap.snapshots(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(m)) = q(p, m, tap);
    return snap;
}

AoaEstimate music_spectrum(const TapSnapshots& snap, const ArrayGeometry& geom,
                           const std::vector<double>& angle_grid, std::size_t num_sources)
{
    const auto P = static_cast<std::size_t>(snap.snapshots.rows());
    const auto M = snap.snapshots.cols();
    if (P != geom.num_antennas) throw EstimationError("music_spectrum: snapshot rows do not match the array");
    if (num_sources < 1 || num_sources >= P) throw EstimationError("music_spectrum: need 1 <= num_sources < P");
    if (M < 2) throw EstimationError("music_spectrum: need at least 2 snapshots");
    if (angle_grid.empty()) throw EstimationError("music_spectrum: empty angle grid");

    const ComplexMatrix R = snap.snapshots * snap.snapshots.adjoint() / static_cast<double>(M);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(R);
    if (eig.info() != Eigen::Success) throw EstimationError("music_spectrum: eigendecomposition failed");

    // Eigenvalues come back ascending.
    const auto& values = eig.eigenvalues();
    const double largest = values(values.size() - 1);
    const double tol = largest * static_cast<double>(P) * std::numeric_limits<double>::epsilon() * 16.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) > tol) ++rank;
    if (rank < num_sources)
        throw EstimationError("music_spectrum: covariance rank " + std::to_string(rank) + " is below the " +
                              std::to_string(num_sources) + " requested sources; use more snapshots or check the tap");

    const auto noise_dim = static_cast<Eigen::Index>(P - num_sources);
    const ComplexMatrix En = eig.eigenvectors().leftCols(noise_dim);

    AoaEstimate est;
    est.tap_bin = snap.tap_bin;
    est.spectrum.resize(angle_grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < angle_grid.size(); ++i) {
        const auto a = steering_vector(angle_grid[i], geom);
        const Eigen::Map<const Eigen::VectorXcd> av(a.data(), static_cast<Eigen::Index>(a.size()));
        const double denom = (En.adjoint() * av).squaredNorm();
        est.spectrum[i] = 1.0 / std::max(denom, std::numeric_limits<double>::min());
        if (est.spectrum[i] > est.spectrum[best] ||
            (est.spectrum[i] == est.spectrum[best] && std::abs(angle_grid[i]) < std::abs(angle_grid[best])))
            best = i;
    }
    est.aoa_rad = angle_grid[best];
    est.peak_value = est.spectrum[best];
    return est;
}

std::vector<AoaEstimate> estimate_taps_aoa(const CirTensor& cir, const RegionOfInterest& roi,
                                           const ArrayGeometry& geom, const std::vector<double>& angle_grid)
{
    if (roi.peak_bins.empty()) throw EstimationError("estimate_taps_aoa: region of interest has no peaks");
    std::vector<AoaEstimate> out;
    out.reserve(roi.peak_bins.size());
    for (std::size_t u : roi.peak_bins) out.push_back(music_spectrum(extract_tap_snapshots(cir, u), geom, angle_grid, 1));
    return out;
}

} // namespace refcal
