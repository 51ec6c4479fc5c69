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

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "refcal/tensor.hpp"

namespace refcal {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Passing this as the SNR to add_noise() disables noise.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps a phase to (-pi, pi].
double wrap_phase(double rad);

// ---- planar geometry -----------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Signed angle from `normal` to `direction`, counter-clockwise positive.
double aoa_from_normal(Vec2 normal, Vec2 direction);

/// Unit world-frame direction at angle `aoa` (counter-clockwise) from `normal`.
Vec2 direction_from_aoa(Vec2 normal, double aoa);

/// Tx -> point -> Rx path length.
double bistatic_range(Vec2 tx, Vec2 rx, Vec2 point);

// ---- grid and array ------------------------------------------------------

/// Reference-signal grid the CSI is extracted on.
struct OfdmGrid {
    std::size_t num_subcarriers = 76;   ///< N, RS subcarriers
    double subcarrier_spacing_hz = 6.48e6;
    std::size_t num_symbols = 10;       ///< M, RS symbols per sensing frame
    double symbol_interval_s = 4e-3;    ///< T, spacing of adjacent RS symbols
    double carrier_frequency_hz = 26e9;

    void validate() const;
    double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }
    /// Delays are only unambiguous within [0, 1/spacing).
    double unambiguous_delay() const { return 1.0 / subcarrier_spacing_hz; }
    double max_doppler() const { return 0.5 / symbol_interval_s; }
};

/// Uniform linear array.
struct ArrayGeometry {
    std::size_t num_antennas = 8;
    double spacing_m = 0.0;
    double wavelength_m = 0.0;

    void validate() const;
    static ArrayGeometry half_wavelength(std::size_t antennas, double wavelength);
};

// ---- paths and impairments -----------------------------------------------

struct PathSpec {
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    double aoa_rad = 0.0;
    cd gain{1.0, 0.0};

    void validate(const OfdmGrid& grid) const;
};

/// Per-antenna sampling time offsets plus the common per-symbol phase (CFO and random phase).
struct ImpairmentSpec {
    std::vector<double> sto_per_antenna_s;
    std::vector<double> phase_trajectory_rad;

    static ImpairmentSpec none(std::size_t antennas, std::size_t symbols);
};

/// Statistical model behind draw_impairments().
///
/// theta_m = wrap(2*pi*cfo_residual_hz*m*T + phase_jitter*eta_m), eta_m ~ U(-pi, pi].
/// STOs are drawn independently per antenna from U[0, sto_max_s); with
/// sto_integer_bins they are rounded down to whole CIR bins of 1/(spacing*fft_size).
struct ImpairmentModel {
    double cfo_residual_hz = 0.0;
    double phase_jitter = 1.0;
    double sto_max_s = 0.0;
    bool sto_integer_bins = false;
    std::size_t fft_size = 1024;
};

ImpairmentSpec draw_impairments(const ImpairmentModel& model, const OfdmGrid& grid,
                                std::size_t antennas, std::mt19937_64& rng);

// ---- scene ---------------------------------------------------------------

struct Target {
    Vec2 position;
    Vec2 velocity;
    cd gain{0.5, 0.0};
};

struct SceneGeometry {
    Vec2 tx{0.0, 0.0};
    Vec2 rx{-3.0, 0.0};
    Vec2 rx_normal{0.70710678118654752, 0.70710678118654752};
    std::optional<Vec2> reference_reflector;
    bool los_blocked = false;
    cd los_gain{1.0, 0.0};
    cd reflector_gain{1.0, 0.0};
    std::vector<Target> targets;

    void validate() const;
};

enum class PathKind { los, reflector, target };

struct ScenePaths {
    std::vector<PathSpec> paths;
    std::vector<PathKind> kinds;
    std::size_t reference_index = 0;
    /// Path index of scene.targets[i].
    std::vector<std::size_t> target_indices;
};

/// Turns scene geometry into propagation paths. The LoS path (when not blocked) is
/// the reference, otherwise the reflector path; both are static.
ScenePaths scene_to_paths(const SceneGeometry& scene, const OfdmGrid& grid);

// ---- CSI synthesis ---------------------------------------------------------

enum class CsiKind { ideal, raw, aligned, calibrated };

struct CsiTensor {
    ComplexGrid3 data;  ///< (antenna p, symbol m, subcarrier n)
    CsiKind kind = CsiKind::ideal;
};

/// a[p] = exp(j*2*pi*p*(d/lambda)*sin(aoa)). Throws DomainError unless |aoa| < pi/2.
std::vector<cd> steering_vector(double aoa, const ArrayGeometry& geom);

/// H_p[m,n] = sum_l a_l[p] b_l exp(-j2pi n df tau_l) exp(+j2pi m fD_l T), all indices 0-based.
CsiTensor ideal_csi(std::span<const PathSpec> paths, const OfdmGrid& grid, const ArrayGeometry& geom);

/// H^_p[m,n] = exp(j theta_m) exp(+j2pi n df sto_p) H_p[m,n]. The STO sign is the opposite
/// of the propagation delay sign, so an STO moves the CIR towards earlier bins.
CsiTensor apply_impairments(const CsiTensor& csi, const ImpairmentSpec& imp, const OfdmGrid& grid);

/// Adds CN(0, sigma^2) with mean(|H|^2)/sigma^2 = 10^(snr_db/10). kNoNoise returns a copy.
CsiTensor add_noise(const CsiTensor& csi, double snr_db, std::uint64_t seed);

} // namespace refcal
