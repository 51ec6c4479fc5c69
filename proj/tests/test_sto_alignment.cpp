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
#include "refcal/error.hpp"
#include "refcal/sto_alignment.hpp"

using namespace refcal;
using Catch::Approx;

namespace {

constexpr std::size_t kU = 1024;

struct Fixture {
    OfdmGrid grid;
    ArrayGeometry geom = ArrayGeometry::half_wavelength(8, OfdmGrid{}.wavelength());
    double bin = 1.0 / (OfdmGrid{}.subcarrier_spacing_hz * double(kU));

    std::vector<PathSpec> paths(std::mt19937_64& rng) const
    {
        std::uniform_real_distribution<double> ph(-kPi, kPi);
        SceneGeometry scene;
        scene.targets.push_back({{-2.0, 5.0}, {}, 0.5});
        auto p = scene_to_paths(scene, grid).paths;
        for (auto& path : p) path.gain *= std::polar(1.0, ph(rng));
        return p;
    }
};

std::vector<double> rotate(const std::vector<double>& v, std::size_t k)
{
    std::vector<double> out(v.size());
    for (std::size_t u = 0; u < v.size(); ++u) out[(u + k) % v.size()] = v[u];
    return out;
}

} // namespace

TEST_CASE("relevance - identical CIRs at zero shift give ROI energy")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    std::vector<cd> cir(64);
    for (auto& v : cir) v = {n01(rng), n01(rng)};
    RegionOfInterest roi;
    roi.member_bins = {3, 4, 5, 40};
    double want = 0.0;
    for (std::size_t u : roi.member_bins) want += std::norm(cir[u]);
    CHECK(relevance(std::span<const cd>(cir), std::span<const cd>(cir), roi, 0) == Approx(want));
}

TEST_CASE("relevance - zero CIR and error cases")
{
    std::vector<cd> a(32, cd(1.0, 1.0)), zero(32);
    RegionOfInterest roi;
    roi.member_bins = {0, 1};
    for (std::size_t s = 0; s < 32; ++s) CHECK(relevance(std::span<const cd>(a), std::span<const cd>(zero), roi, s) == 0.0);
    CHECK_THROWS_AS(relevance(std::span<const cd>(a), std::span<const cd>(a), RegionOfInterest{}, 0), EstimationError);
    CHECK_THROWS_AS(relevance(std::span<const cd>(a), std::span<const cd>(a), roi, 32), EstimationError);
}

TEST_CASE("relevance - rotated copy is best matched at the rotation")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> rot(0, 127);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> ref(128);
        for (auto& v : ref) v = 0.05 * u(rng);
        ref[17] = 1.0;
        ref[18] = 0.7;
        ref[60] = 0.8;
        const auto roi = find_region_of_interest([&] {
            std::vector<double> pw(ref.size());
            for (std::size_t i = 0; i < ref.size(); ++i) pw[i] = ref[i] * ref[i];
            return pw;
        }(), 2);
        const std::size_t k = rot(rng);
        const auto other = rotate(ref, k);

        // exhaustive oracle
        std::size_t best = 0;
        double best_val = -1.0;
        for (std::size_t s = 0; s < 128; ++s) {
            double sum = 0.0;
            for (std::size_t m : roi.member_bins) sum += ref[m] * other[(m + s) % 128];
            const double got = relevance(std::span<const double>(ref), std::span<const double>(other), roi, s);
            CHECK(got == Approx(sum).epsilon(1e-14));
            if (sum > best_val) {
                best_val = sum;
                best = s;
            }
        }
        CHECK(best == k);
    }
}

TEST_CASE("estimate_relative_sto - zero STO gives zero shifts")
{
    Fixture f;
    std::mt19937_64 rng(3);
    const auto csi = ideal_csi(f.paths(rng), f.grid, f.geom);
    const auto cir = compute_cir(csi, kU, f.grid);
    const auto est = estimate_relative_sto(cir, find_region_of_interest(antenna_power_profile(cir, 0)));
    CHECK(est.shifts_bins == std::vector<std::size_t>(8, 0));
    CHECK(est.fft_size == kU);
    CHECK(est.bin_duration_s == Approx(f.bin));
}

TEST_CASE("estimate_relative_sto - linear STO ramp is recovered exactly")
{
    Fixture f;
    std::mt19937_64 rng(4);
    auto imp = ImpairmentSpec::none(8, f.grid.num_symbols);
    for (std::size_t p = 0; p < 8; ++p) imp.sto_per_antenna_s[p] = double(3 * p) * f.bin;
    const auto raw = apply_impairments(ideal_csi(f.paths(rng), f.grid, f.geom), imp, f.grid);
    const auto cir = compute_cir(raw, kU, f.grid);
    const auto est = estimate_relative_sto(cir, find_region_of_interest(antenna_power_profile(cir, 0)));
    CHECK(est.shifts_bins == std::vector<std::size_t>{0, 3, 6, 9, 12, 15, 18, 21});
    CHECK(est.relative_sto_s(7) == Approx(21 * f.bin));
}

TEST_CASE("estimate_relative_sto - negative relative STO wraps and reads back signed")
{
    Fixture f;
    std::mt19937_64 rng(5);
    auto imp = ImpairmentSpec::none(8, f.grid.num_symbols);
    for (std::size_t p = 0; p < 8; ++p) imp.sto_per_antenna_s[p] = double(40 - 5 * p) * f.bin;
    const auto raw = apply_impairments(ideal_csi(f.paths(rng), f.grid, f.geom), imp, f.grid);
    const auto cir = compute_cir(raw, kU, f.grid);
    const auto est = estimate_relative_sto(cir, find_region_of_interest(antenna_power_profile(cir, 0)));
    for (std::size_t p = 1; p < 8; ++p) {
        CHECK(est.shifts_bins[p] == kU - 5 * p);
        CHECK(est.relative_sto_s(p) == Approx(-double(5 * p) * f.bin));
    }
}

TEST_CASE("estimate_relative_sto - all-zero antenna is reported by index")
{
    Fixture f;
    std::mt19937_64 rng(6);
    auto csi = ideal_csi(f.paths(rng), f.grid, f.geom);
    for (std::size_t m = 0; m < f.grid.num_symbols; ++m)
        for (auto& v : csi.data.row(5, m)) v = 0.0;
    const auto cir = compute_cir(csi, kU, f.grid);
    const auto roi = find_region_of_interest(antenna_power_profile(cir, 0));
    CHECK_THROWS_WITH(estimate_relative_sto(cir, roi), Catch::Matchers::ContainsSubstring("antenna 5"));
}

TEST_CASE("estimate_relative_sto - random integer STOs at 20 dB")
{
    Fixture f;
    std::mt19937_64 rng(7);
    const ImpairmentModel model{.cfo_residual_hz = 2.0, .phase_jitter = 1.0, .sto_max_s = 20e-9,
                                .sto_integer_bins = true, .fft_size = kU};
    const int trials = 100;
    int exact = 0;
    for (int t = 0; t < trials; ++t) {
        const auto imp = draw_impairments(model, f.grid, 8, rng);
        const auto raw = add_noise(apply_impairments(ideal_csi(f.paths(rng), f.grid, f.geom), imp, f.grid), 20.0, rng());
        const auto cir = compute_cir(raw, kU, f.grid);
        const auto est = estimate_relative_sto(cir, find_region_of_interest(antenna_power_profile(cir, 0)));
        const auto k0 = std::llround(imp.sto_per_antenna_s[0] / f.bin);
        bool ok = true;
        for (std::size_t p = 0; p < 8; ++p) {
            const auto kp = std::llround(imp.sto_per_antenna_s[p] / f.bin);
            ok = ok && est.shifts_bins[p] == static_cast<std::size_t>((kp - k0 + std::int64_t(kU)) % std::int64_t(kU));
        }
        exact += ok ? 1 : 0;
    }
    CHECK(exact >= 99);
}

TEST_CASE("compensate_relative_sto - zero shifts is the identity")
{
    Fixture f;
    std::mt19937_64 rng(8);
    const auto csi = ideal_csi(f.paths(rng), f.grid, f.geom);
    ShiftEstimate est;
    est.shifts_bins.assign(8, 0);
    est.bin_duration_s = f.bin;
    est.fft_size = kU;
    const auto out = compensate_relative_sto(csi, est, f.grid);
    CHECK(out.kind == CsiKind::aligned);
    for (std::size_t k = 0; k < csi.data.size(); ++k) CHECK(out.data.flat()[k] == csi.data.flat()[k]);

    est.shifts_bins.assign(7, 0);
    CHECK_THROWS_AS(compensate_relative_sto(csi, est, f.grid), ConfigError);
}

TEST_CASE("compensate_relative_sto - aligned CSI equals a uniform-STO rebuild")
{
    Fixture f;
    std::mt19937_64 rng(9);
    const ImpairmentModel model{.cfo_residual_hz = 2.0, .phase_jitter = 1.0, .sto_max_s = 20e-9,
                                .sto_integer_bins = true, .fft_size = kU};
    for (int t = 0; t < 20; ++t) {
        const auto ideal = ideal_csi(f.paths(rng), f.grid, f.geom);
        const auto imp = draw_impairments(model, f.grid, 8, rng);
        const auto raw = apply_impairments(ideal, imp, f.grid);
        const auto cir = compute_cir(raw, kU, f.grid);
        const auto est = estimate_relative_sto(cir, find_region_of_interest(antenna_power_profile(cir, 0)));
        const auto aligned = compensate_relative_sto(raw, est, f.grid);

        auto uniform = imp;
        uniform.sto_per_antenna_s.assign(8, imp.sto_per_antenna_s[0]);
        const auto want = apply_impairments(ideal, uniform, f.grid);
        CHECK(oracle::max_relative_error(aligned.data.flat(), want.data.flat()) < 1e-10);

        for (std::size_t k = 0; k < raw.data.size(); ++k)
            CHECK(std::abs(aligned.data.flat()[k]) == Approx(std::abs(raw.data.flat()[k])).epsilon(1e-12));
    }
}

TEST_CASE("compensate_relative_sto - aligned single-path CIR peaks agree across antennas")
{
    Fixture f;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ImpairmentModel model{.cfo_residual_hz = 2.0, .phase_jitter = 1.0, .sto_max_s = 20e-9,
                                .sto_integer_bins = true, .fft_size = kU};
    for (int t = 0; t < 20; ++t) {
        const std::vector<PathSpec> one{{(50.0 + 300.0 * u(rng)) * f.bin, 0.0, 0.4 * u(rng), 1.0}};
        const auto raw = apply_impairments(ideal_csi(one, f.grid, f.geom), draw_impairments(model, f.grid, 8, rng), f.grid);
        const auto cir = compute_cir(raw, kU, f.grid);
        const auto est = estimate_relative_sto(cir, find_region_of_interest(antenna_power_profile(cir, 0)));
        const auto acir = compute_cir(compensate_relative_sto(raw, est, f.grid), kU, f.grid);
        const auto peak0 = find_region_of_interest(antenna_power_profile(acir, 0), 1).peak_bins;
        for (std::size_t p = 1; p < 8; ++p)
            CHECK(find_region_of_interest(antenna_power_profile(acir, p), 1).peak_bins == peak0);
    }
}
