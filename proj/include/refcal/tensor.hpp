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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace refcal {

using cd = std::complex<double>;

/// Dense complex grid indexed (antenna, symbol, bin), bin index fastest.
class ComplexGrid3 {
public:
    ComplexGrid3() = default;
    ComplexGrid3(std::size_t antennas, std::size_t symbols, std::size_t bins)
        : antennas_(antennas), symbols_(symbols), bins_(bins), data_(antennas * symbols * bins) {}

    std::size_t antennas() const noexcept { return antennas_; }
    std::size_t symbols() const noexcept { return symbols_; }
    std::size_t bins() const noexcept { return bins_; }
    std::size_t size() const noexcept { return data_.size(); }

    cd& operator()(std::size_t p, std::size_t m, std::size_t n) { return data_[offset(p, m, n)]; }
    const cd& operator()(std::size_t p, std::size_t m, std::size_t n) const { return data_[offset(p, m, n)]; }

    std::span<cd> row(std::size_t p, std::size_t m) { return {data_.data() + offset(p, m, 0), bins_}; }
    std::span<const cd> row(std::size_t p, std::size_t m) const { return {data_.data() + offset(p, m, 0), bins_}; }

    std::span<cd> flat() noexcept { return data_; }
    std::span<const cd> flat() const noexcept { return data_; }

    bool same_shape(const ComplexGrid3& o) const noexcept {
        return antennas_ == o.antennas_ && symbols_ == o.symbols_ && bins_ == o.bins_;
    }

private:
    std::size_t offset(std::size_t p, std::size_t m, std::size_t n) const noexcept {
        return (p * symbols_ + m) * bins_ + n;
    }

    std::size_t antennas_ = 0;
    std::size_t symbols_ = 0;
    std::size_t bins_ = 0;
    std::vector<cd> data_;
};

} // namespace refcal
