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

#include "refcal/signal_model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "refcal/error.hpp"

namespace refcal {

double wrap_phase(double rad)
{
    double r = std::remainder(rad, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

double aoa_from_normal(Vec2 normal, Vec2 direction)
{
    return std::atan2(cross(normal, direction), dot(normal, direction));
}

Vec2 direction_from_aoa(Vec2 normal, double aoa)
{
    const double n = norm(normal);
    const double c = std::cos(aoa);
    const double s = std::sin(aoa);
    return {(c * normal.x - s * normal.y) / n, (s * normal.x + c * normal.y) / n};
}

double bistatic_range(Vec2 tx, Vec2 rx, Vec2 point)
{
    return norm(point - tx) + norm(rx - point);
}

void OfdmGrid::validate() const
{
    if (num_subcarriers < 2) throw ConfigError("grid: num_subcarriers must be >= 2");
    if (num_symbols < 2) throw ConfigError("grid: num_symbols must be >= 2");
    if (!(subcarrier_spacing_hz > 0.0)) throw ConfigError("grid: subcarrier spacing must be > 0");
    if (!(symbol_interval_s > 0.0)) throw ConfigError("grid: symbol interval must be > 0");
    if (!(carrier_frequency_hz > 0.0)) throw ConfigError("grid: carrier frequency must be > 0");
}

void ArrayGeometry::validate() const
{
    if (num_antennas < 2) throw ConfigError("array: num_antennas must be >= 2");
    if (!(spacing_m > 0.0)) throw ConfigError("array: spacing must be > 0");
    if (!(wavelength_m > 0.0)) throw ConfigError("array: wavelength must be > 0");
}

ArrayGeometry ArrayGeometry::half_wavelength(std::size_t antennas, double wavelength)
{
    return {antennas, 0.5 * wavelength, wavelength};
}

void PathSpec::validate(const OfdmGrid& grid) const
{
    if (!(delay_s >= 0.0) || delay_s >= grid.unambiguous_delay()) {
        std::ostringstream os;
        os << "path delay " << delay_s << " s outside the unambiguous span [0, "
           << grid.unambiguous_delay() << ")";
        throw ConfigError(os.str());
    }
    if (!(std::abs(doppler_hz) < grid.max_doppler())) {
        std::ostringstream os;
        os << "path Doppler " << doppler_hz << " Hz aliases (limit " << grid.max_doppler() << " Hz)";
        throw ConfigError(os.str());
    }
    if (!(std::abs(aoa_rad) < kPi / 2)) throw DomainError("path AoA must lie in (-90, 90) deg");
    if (!(std::abs(gain) > 0.0)) throw ConfigError("path gain must be nonzero");
}

ImpairmentSpec ImpairmentSpec::none(std::size_t antennas, std::size_t symbols)
{
    return {std::vector<double>(antennas, 0.0), std::vector<double>(symbols, 0.0)};
}

ImpairmentSpec draw_impairments(const ImpairmentModel& model, const OfdmGrid& grid,
                                std::size_t antennas, std::mt19937_64& rng)
{
    ImpairmentSpec imp;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    imp.phase_trajectory_rad.resize(grid.num_symbols);
    for (std::size_t m = 0; m < grid.num_symbols; ++m) {
        // eta in (-pi, pi]
        const double eta = kPi - 2.0 * kPi * unit(rng);
        const double cfo = 2.0 * kPi * model.cfo_residual_hz * static_cast<double>(m) * grid.symbol_interval_s;
        imp.phase_trajectory_rad[m] = wrap_phase(cfo + model.phase_jitter * eta);
    }

    const double bin = 1.0 / (grid.subcarrier_spacing_hz * static_cast<double>(model.fft_size));
    imp.sto_per_antenna_s.resize(antennas);
    for (auto& sto : imp.sto_per_antenna_s) {
        sto = model.sto_max_s * unit(rng);
        if (model.sto_integer_bins) sto = std::floor(sto / bin) * bin;
    }
    return imp;
}

void SceneGeometry::validate() const
{
    if (tx == rx) throw ConfigError("scene: tx and rx must not coincide");
    if (std::abs(norm(rx_normal) - 1.0) > 1e-9) throw ConfigError("scene: rx_normal must have unit norm");
    if (los_blocked && !reference_reflector)
        throw ConfigError("scene: los_blocked requires a reference reflector");
}

namespace {

PathSpec geometric_path(const SceneGeometry& scene, Vec2 point, Vec2 velocity, cd gain, double wavelength)
{
    const Vec2 to_tx = point - scene.tx;
    const Vec2 to_rx = point - scene.rx;
    const double range_rate = dot(velocity, (1.0 / norm(to_tx)) * to_tx) + dot(velocity, (1.0 / norm(to_rx)) * to_rx);

    PathSpec path;
    path.delay_s = bistatic_range(scene.tx, scene.rx, point) / kSpeedOfLight;
    path.aoa_rad = aoa_from_normal(scene.rx_normal, point - scene.rx);
    // A shrinking bistatic range gives a positive Doppler shift.
    path.doppler_hz = -range_rate / wavelength;
    path.gain = gain;
    return path;
}

} // namespace

ScenePaths scene_to_paths(const SceneGeometry& scene, const OfdmGrid& grid)
{
    scene.validate();
    grid.validate();

    ScenePaths out;
    auto push = [&](PathSpec path, PathKind kind, const char* what) {
        try {
            path.validate(grid);
        } catch (const Error& e) {
            throw ConfigError(std::string("scene ") + what + ": " + e.what());
        }
        out.paths.push_back(path);
        out.kinds.push_back(kind);
        return out.paths.size() - 1;
    };

    std::optional<std::size_t> los;
    std::optional<std::size_t> reflector;
    if (!scene.los_blocked) {
        PathSpec path;
        path.delay_s = norm(scene.tx - scene.rx) / kSpeedOfLight;
        path.aoa_rad = aoa_from_normal(scene.rx_normal, scene.tx - scene.rx);
        path.gain = scene.los_gain;
        los = push(path, PathKind::los, "LoS path");
    }
    if (scene.reference_reflector) {
        reflector = push(geometric_path(scene, *scene.reference_reflector, {}, scene.reflector_gain, grid.wavelength()),
                         PathKind::reflector, "reflector path");
    }
    for (const auto& target : scene.targets) {
        out.target_indices.push_back(
            push(geometric_path(scene, target.position, target.velocity, target.gain, grid.wavelength()),
                 PathKind::target, "target path"));
    }
    if (!los && !reflector) throw ConfigError("scene: no reference path (LoS blocked and no reflector)");
    out.reference_index = los ? *los : *reflector;
    return out;
}

std::vector<cd> steering_vector(double aoa, const ArrayGeometry& geom)
{
    if (!(std::abs(aoa) < kPi / 2)) throw DomainError("steering_vector: AoA must lie in (-90, 90) deg");
    const double step = 2.0 * kPi * (geom.spacing_m / geom.wavelength_m) * std::sin(aoa);
    std::vector<cd> a(geom.num_antennas);
    for (std::size_t p = 0; p < a.size(); ++p) a[p] = std::polar(1.0, step * static_cast<double>(p));
    return a;
}

CsiTensor ideal_csi(std::span<const PathSpec> paths, const OfdmGrid& grid, const ArrayGeometry& geom)
{
    grid.validate();
    geom.validate();
    const std::size_t P = geom.num_antennas, M = grid.num_symbols, N = grid.num_subcarriers;
    CsiTensor out{ComplexGrid3(P, M, N), CsiKind::ideal};

    std::vector<cd> ramp(N);
    std::vector<cd> doppler(M);
    for (const auto& path : paths) {
        path.validate(grid);
        const auto a = steering_vector(path.aoa_rad, geom);
        for (std::size_t n = 0; n < N; ++n)
            ramp[n] = std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * grid.subcarrier_spacing_hz * path.delay_s);
        for (std::size_t m = 0; m < M; ++m)
            doppler[m] = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) * path.doppler_hz * grid.symbol_interval_s);

        for (std::size_t p = 0; p < P; ++p) {
            for (std::size_t m = 0; m < M; ++m) {
                const cd scale = a[p] * path.gain * doppler[m];
                auto row = out.data.row(p, m);
                for (std::size_t n = 0; n < N; ++n) row[n] += scale * ramp[n];
            }
        }
    }
    return out;
}

CsiTensor apply_impairments(const CsiTensor& csi, const ImpairmentSpec& imp, const OfdmGrid& grid)
{
    const auto& in = csi.data;
    if (imp.sto_per_antenna_s.size() != in.antennas() || imp.phase_trajectory_rad.size() != in.symbols())
        throw ConfigError("apply_impairments: impairment dimensions do not match the CSI tensor");

    CsiTensor out{in, CsiKind::raw};
    std::vector<cd> ramp(in.bins());
    for (std::size_t p = 0; p < in.antennas(); ++p) {
        for (std::size_t n = 0; n < in.bins(); ++n)
            ramp[n] = std::polar(1.0, 2.0 * kPi * static_cast<double>(n) * grid.subcarrier_spacing_hz * imp.sto_per_antenna_s[p]);
        for (std::size_t m = 0; m < in.symbols(); ++m) {
            const cd common = std::polar(1.0, imp.phase_trajectory_rad[m]);
            auto row = out.data.row(p, m);
            for (std::size_t n = 0; n < row.size(); ++n) row[n] *= common * ramp[n];
        }
    }
    return out;
}

CsiTensor add_noise(const CsiTensor& csi, double snr_db, std::uint64_t seed)
{
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw DomainError("add_noise: SNR must be finite (or +inf to disable noise)");
    CsiTensor out = csi;
    if (snr_db == kNoNoise) return out;

    const auto flat = csi.data.flat();
    if (flat.empty()) return out;
    const double power = std::accumulate(flat.begin(), flat.end(), 0.0,
                                         [](double acc, cd v) { return acc + std::norm(v); }) /
                         static_cast<double>(flat.size());
    const double variance = power / std::pow(10.0, snr_db / 10.0);
    if (variance == 0.0) return out;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    for (auto& v : out.data.flat()) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += cd(re, im);
    }
    return out;
}

} // namespace refcal
