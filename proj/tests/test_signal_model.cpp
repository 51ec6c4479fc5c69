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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "refcal/cir.hpp"
#include "refcal/error.hpp"
#include "refcal/signal_model.hpp"

using namespace refcal;
using Catch::Approx;

namespace {

SceneGeometry paper_scene()
{
    SceneGeometry s;
    s.tx = {0.0, 0.0};
    s.rx = {-3.0, 0.0};
    s.rx_normal = {std::sqrt(0.5), std::sqrt(0.5)};
    return s;
}

OfdmGrid small_grid(std::size_t M, std::size_t N)
{
    OfdmGrid g;
    g.num_symbols = M;
    g.num_subcarriers = N;
    return g;
}

std::vector<PathSpec> random_paths(std::mt19937_64& rng, const OfdmGrid& g, std::size_t count)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PathSpec> paths(count);
    for (auto& p : paths) {
        p.delay_s = 0.999 * u(rng) * g.unambiguous_delay();
        p.doppler_hz = (2.0 * u(rng) - 1.0) * 0.9 * g.max_doppler();
        p.aoa_rad = (2.0 * u(rng) - 1.0) * 1.5;
        p.gain = std::polar(0.1 + u(rng), 2.0 * kPi * u(rng));
    }
    return paths;
}

} // namespace

TEST_CASE("steering_vector - broadside and half-wavelength examples")
{
    const auto geom = ArrayGeometry::half_wavelength(8, 0.0115);
    for (const auto& v : steering_vector(0.0, geom)) CHECK(v == cd(1.0, 0.0));

    // 2*pi*p*0.5*sin(-pi/4) = -pi*p/sqrt(2)
    const auto a = steering_vector(deg2rad(-45.0), ArrayGeometry::half_wavelength(3, 0.0115));
    CHECK(a[0] == cd(1.0, 0.0));
    CHECK(std::arg(a[1]) == Approx(-2.2214414691).margin(1e-9));
    CHECK(wrap_phase(std::arg(a[2]) + 2.0 * kPi) == Approx(wrap_phase(-4.4428829382)).margin(1e-9));

    const auto b = steering_vector(deg2rad(30.0), geom);
    for (std::size_t p = 1; p < b.size(); ++p) CHECK(std::arg(b[p] / b[p - 1]) == Approx(kPi / 2).margin(1e-12));
}

TEST_CASE("steering_vector - rejects endfire and beyond")
{
    const auto geom = ArrayGeometry::half_wavelength(4, 0.01);
    CHECK_THROWS_AS(steering_vector(kPi / 2, geom), DomainError);
    CHECK_THROWS_AS(steering_vector(-2.0, geom), DomainError);
}

TEST_CASE("steering_vector - mirror angle gives the conjugate")
{
    const auto geom = ArrayGeometry::half_wavelength(8, 0.0115);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 50; ++i) {
        const double phi = u(rng);
        const auto a = steering_vector(phi, geom);
        const auto b = steering_vector(-phi, geom);
        for (std::size_t p = 0; p < a.size(); ++p) CHECK(std::abs(b[p] - std::conj(a[p])) < 1e-14);
    }
}

TEST_CASE("wrap_phase - maps into (-pi, pi]")
{
    CHECK(wrap_phase(kPi) == Approx(kPi));
    CHECK(wrap_phase(-kPi) == Approx(kPi));
    CHECK(wrap_phase(3.0 * kPi / 2) == Approx(-kPi / 2));
    CHECK(wrap_phase(0.25) == Approx(0.25));
}

TEST_CASE("scene_to_paths - LoS geometry of the prototype room")
{
    const OfdmGrid grid;
    const auto paths = scene_to_paths(paper_scene(), grid);
    REQUIRE(paths.paths.size() == 1);
    REQUIRE(paths.kinds[0] == PathKind::los);
    CHECK(paths.reference_index == 0);
    const auto& los = paths.paths[0];
    CHECK(los.delay_s == Approx(10.0069e-9).epsilon(1e-5));
    CHECK(los.delay_s * kSpeedOfLight == Approx(3.0));
    CHECK(rad2deg(los.aoa_rad) == Approx(-45.0).margin(1e-9));
    CHECK(los.doppler_hz == 0.0);
}

TEST_CASE("scene_to_paths - reflector path of the NLoS setup")
{
    auto scene = paper_scene();
    scene.reference_reflector = Vec2{-1.5, 13.3};
    scene.los_blocked = true;
    const auto paths = scene_to_paths(scene, OfdmGrid{});
    REQUIRE(paths.paths.size() == 1);
    CHECK(paths.kinds[0] == PathKind::reflector);
    const auto& ref = paths.paths[paths.reference_index];
    CHECK(ref.delay_s * kSpeedOfLight == Approx(26.77).margin(0.01));
    CHECK(rad2deg(ref.aoa_rad) == Approx(38.5).margin(0.1));
    CHECK(ref.doppler_hz == 0.0);
}

TEST_CASE("scene_to_paths - LoS is preferred as reference when both exist")
{
    auto scene = paper_scene();
    scene.reference_reflector = Vec2{-1.5, 13.3};
    scene.targets.push_back({{-2.0, 5.0}, {}, 0.5});
    const auto paths = scene_to_paths(scene, OfdmGrid{});
    REQUIRE(paths.paths.size() == 3);
    CHECK(paths.kinds[paths.reference_index] == PathKind::los);
    REQUIRE(paths.target_indices.size() == 1);
    CHECK(paths.kinds[paths.target_indices[0]] == PathKind::target);
}

TEST_CASE("scene_to_paths - target Doppler follows the bistatic range rate")
{
    auto scene = paper_scene();
    scene.targets.push_back({{-2.0, 5.0}, {}, 0.5});
    const OfdmGrid grid;
    CHECK(scene_to_paths(scene, grid).paths[1].doppler_hz == 0.0);

    // Moving towards both Tx and Rx shortens the path: positive Doppler.
    scene.targets[0].velocity = {0.0, -0.5};
    const auto moving = scene_to_paths(scene, grid).paths[1];
    const Vec2 t = scene.targets[0].position;
    const double rate = dot(scene.targets[0].velocity, (1.0 / norm(t - scene.tx)) * (t - scene.tx)) +
                        dot(scene.targets[0].velocity, (1.0 / norm(t - scene.rx)) * (t - scene.rx));
    CHECK(moving.doppler_hz > 0.0);
    CHECK(moving.doppler_hz == Approx(-rate / grid.wavelength()));
}

TEST_CASE("scene_to_paths - configuration errors")
{
    const OfdmGrid grid;
    auto far = paper_scene();
    far.targets.push_back({{-3.0, 30.0}, {}, 0.5});  // ~63 m bistatic range aliases at 6.48 MHz spacing
    CHECK_THROWS_AS(scene_to_paths(far, grid), ConfigError);

    auto blocked = paper_scene();
    blocked.los_blocked = true;
    CHECK_THROWS_AS(scene_to_paths(blocked, grid), ConfigError);

    auto same = paper_scene();
    same.rx = same.tx;
    CHECK_THROWS_AS(scene_to_paths(same, grid), ConfigError);

    auto fast = paper_scene();
    fast.targets.push_back({{-2.0, 5.0}, {0.0, -5.0}, 0.5});  // Doppler beyond +/-125 Hz
    CHECK_THROWS_AS(scene_to_paths(fast, grid), ConfigError);
}

TEST_CASE("ideal_csi - unit path at zero delay is all ones")
{
    const auto grid = small_grid(3, 8);
    const auto geom = ArrayGeometry::half_wavelength(4, grid.wavelength());
    const std::vector<PathSpec> paths{{0.0, 0.0, 0.0, 1.0}};
    const auto csi = ideal_csi(paths, grid, geom);
    CHECK(csi.kind == CsiKind::ideal);
    for (const auto& v : csi.data.flat()) CHECK(std::abs(v - cd(1.0, 0.0)) < 1e-15);
}

TEST_CASE("ideal_csi - on-grid delay gives a DFT column along subcarriers")
{
    const std::size_t N = 16;
    const auto grid = small_grid(2, N);
    const auto geom = ArrayGeometry::half_wavelength(2, grid.wavelength());
    const std::size_t k = 5;
    const std::vector<PathSpec> paths{{double(k) / (double(N) * grid.subcarrier_spacing_hz), 0.0, 0.0, 1.0}};
    const auto csi = ideal_csi(paths, grid, geom);
    for (std::size_t n = 0; n < N; ++n)
        CHECK(std::abs(csi.data(1, 1, n) - std::polar(1.0, -2.0 * kPi * double(k * n) / double(N))) < 1e-12);
}

TEST_CASE("ideal_csi - two paths match the scalar oracle")
{
    const auto grid = small_grid(2, 4);
    const auto geom = ArrayGeometry::half_wavelength(2, grid.wavelength());
    const std::vector<PathSpec> paths{{12e-9, 0.0, deg2rad(-45.0), cd(1.0, 0.0)},
                                      {40e-9, 30.0, deg2rad(20.0), std::polar(0.5, 1.0)}};
    const auto csi = ideal_csi(paths, grid, geom);
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t m = 0; m < 2; ++m)
            for (std::size_t n = 0; n < 4; ++n)
                CHECK(std::abs(csi.data(p, m, n) - oracle::ideal_entry(paths, grid, geom, p, m, n)) < 1e-13);
}

TEST_CASE("ideal_csi and apply_impairments - random instances match the oracle")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> dimP(2, 4), dimM(2, 4), dimN(2, 8), dimL(1, 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto grid = small_grid(dimM(rng), dimN(rng));
        const auto geom = ArrayGeometry::half_wavelength(dimP(rng), grid.wavelength());
        const auto paths = random_paths(rng, grid, dimL(rng));

        ImpairmentSpec imp;
        for (std::size_t p = 0; p < geom.num_antennas; ++p) imp.sto_per_antenna_s.push_back(50e-9 * u(rng));
        for (std::size_t m = 0; m < grid.num_symbols; ++m) imp.phase_trajectory_rad.push_back(wrap_phase(7.0 * u(rng)));

        const auto ideal = ideal_csi(paths, grid, geom);
        const auto raw = apply_impairments(ideal, imp, grid);
        CHECK(raw.kind == CsiKind::raw);

        std::vector<cd> want_ideal, want_raw;
        for (std::size_t p = 0; p < geom.num_antennas; ++p)
            for (std::size_t m = 0; m < grid.num_symbols; ++m)
                for (std::size_t n = 0; n < grid.num_subcarriers; ++n) {
                    const cd h = oracle::ideal_entry(paths, grid, geom, p, m, n);
                    want_ideal.push_back(h);
                    want_raw.push_back(oracle::impaired_entry(h, imp, grid, p, m, n));
                }
        CHECK(oracle::max_relative_error(ideal.data.flat(), want_ideal) < 1e-12);
        CHECK(oracle::max_relative_error(raw.data.flat(), want_raw) < 1e-12);
    }
}

TEST_CASE("ideal_csi - superposition over path sets")
{
    std::mt19937_64 rng(5);
    const auto grid = small_grid(4, 8);
    const auto geom = ArrayGeometry::half_wavelength(4, grid.wavelength());
    for (int i = 0; i < 20; ++i) {
        const auto a = random_paths(rng, grid, 2);
        const auto b = random_paths(rng, grid, 3);
        auto both = a;
        both.insert(both.end(), b.begin(), b.end());
        const auto ha = ideal_csi(a, grid, geom), hb = ideal_csi(b, grid, geom), hab = ideal_csi(both, grid, geom);
        std::vector<cd> sum(ha.data.size());
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = ha.data.flat()[k] + hb.data.flat()[k];
        CHECK(oracle::max_relative_error(hab.data.flat(), sum) < 1e-12);
    }
}

TEST_CASE("apply_impairments - identity and unit modulus")
{
    std::mt19937_64 rng(8);
    const auto grid = small_grid(5, 16);
    const auto geom = ArrayGeometry::half_wavelength(4, grid.wavelength());
    const auto ideal = ideal_csi(random_paths(rng, grid, 3), grid, geom);

    const auto same = apply_impairments(ideal, ImpairmentSpec::none(4, 5), grid);
    for (std::size_t k = 0; k < ideal.data.size(); ++k) CHECK(same.data.flat()[k] == ideal.data.flat()[k]);

    ImpairmentModel model{.cfo_residual_hz = 20.0, .phase_jitter = 1.0, .sto_max_s = 0.0};
    const auto imp = draw_impairments(model, grid, 4, rng);
    const auto raw = apply_impairments(ideal, imp, grid);
    for (std::size_t k = 0; k < ideal.data.size(); ++k)
        CHECK(std::abs(raw.data.flat()[k]) == Approx(std::abs(ideal.data.flat()[k])).epsilon(1e-14));
    // zero STO: every subcarrier of a symbol turns by the same angle
    for (std::size_t m = 0; m < 5; ++m)
        for (std::size_t n = 0; n < 16; ++n)
            CHECK(std::abs(raw.data(2, m, n) - std::polar(1.0, imp.phase_trajectory_rad[m]) * ideal.data(2, m, n)) < 1e-12);

    CHECK_THROWS_AS(apply_impairments(ideal, ImpairmentSpec::none(3, 5), grid), ConfigError);
}

TEST_CASE("apply_impairments - integer-bin STO rotates the CIR")
{
    const std::size_t U = 64;
    OfdmGrid grid = small_grid(2, 16);
    const auto geom = ArrayGeometry::half_wavelength(3, grid.wavelength());
    const double bin = 1.0 / (grid.subcarrier_spacing_hz * U);
    const std::vector<PathSpec> paths{{20 * bin, 0.0, 0.3, 1.0}, {37.4 * bin, 0.0, -0.2, 0.4}};
    const auto ideal = ideal_csi(paths, grid, geom);

    auto imp = ImpairmentSpec::none(3, 2);
    imp.sto_per_antenna_s = {0.0, 7 * bin, 25 * bin};
    const auto before = compute_cir(ideal, U, grid);
    const auto after = compute_cir(apply_impairments(ideal, imp, grid), U, grid);
    const std::size_t k[] = {0, 7, 25};
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t u = 0; u < U; ++u) CHECK(std::abs(after.data(p, 1, (u + U - k[p]) % U) - before.data(p, 1, u)) < 1e-12);
}

TEST_CASE("draw_impairments - phase range and integer-bin STOs")
{
    std::mt19937_64 rng(21);
    const OfdmGrid grid;
    ImpairmentModel model{.cfo_residual_hz = 3.0, .phase_jitter = 1.0, .sto_max_s = 30e-9, .sto_integer_bins = true,
                          .fft_size = 1024};
    const auto imp = draw_impairments(model, grid, 8, rng);
    REQUIRE(imp.phase_trajectory_rad.size() == grid.num_symbols);
    REQUIRE(imp.sto_per_antenna_s.size() == 8);
    for (double t : imp.phase_trajectory_rad) CHECK((t > -kPi && t <= kPi));
    const double bin = 1.0 / (grid.subcarrier_spacing_hz * 1024.0);
    for (double s : imp.sto_per_antenna_s) {
        CHECK(s >= 0.0);
        CHECK(s < 30e-9);
        CHECK(std::abs(s / bin - std::round(s / bin)) < 1e-9);
    }

    const auto quiet = draw_impairments(ImpairmentModel{.phase_jitter = 0.0}, grid, 8, rng);
    for (double t : quiet.phase_trajectory_rad) CHECK(t == 0.0);
    for (double s : quiet.sto_per_antenna_s) CHECK(s == 0.0);

    // pure CFO: theta advances by 2*pi*f*T per symbol
    const auto cfo = draw_impairments(ImpairmentModel{.cfo_residual_hz = 10.0, .phase_jitter = 0.0}, grid, 2, rng);
    for (std::size_t m = 1; m < grid.num_symbols; ++m)
        CHECK(wrap_phase(cfo.phase_trajectory_rad[m] - cfo.phase_trajectory_rad[m - 1]) ==
              Approx(wrap_phase(2.0 * kPi * 10.0 * grid.symbol_interval_s)));
}

TEST_CASE("add_noise - no-noise sentinel, power and determinism")
{
    std::mt19937_64 rng(2);
    const auto grid = small_grid(10, 76);
    const auto geom = ArrayGeometry::half_wavelength(16, grid.wavelength());
    const auto csi = ideal_csi(random_paths(rng, grid, 3), grid, geom);  // 12160 entries

    const auto same = add_noise(csi, kNoNoise, 1);
    for (std::size_t k = 0; k < csi.data.size(); ++k) CHECK(same.data.flat()[k] == csi.data.flat()[k]);

    double signal = 0.0, noise = 0.0;
    const auto noisy = add_noise(csi, 0.0, 99);
    for (std::size_t k = 0; k < csi.data.size(); ++k) {
        signal += std::norm(csi.data.flat()[k]);
        noise += std::norm(noisy.data.flat()[k] - csi.data.flat()[k]);
    }
    CHECK(noise / signal == Approx(1.0).epsilon(0.05));

    const auto again = add_noise(csi, 0.0, 99);
    for (std::size_t k = 0; k < csi.data.size(); ++k) CHECK(again.data.flat()[k] == noisy.data.flat()[k]);
    const auto other = add_noise(csi, 0.0, 100);
    CHECK(other.data.flat()[0] != noisy.data.flat()[0]);

    CHECK_THROWS_AS(add_noise(csi, std::nan(""), 1), DomainError);
}
