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
#include <span>

#include "refcal/tensor.hpp"

namespace refcal::detail {

enum class FftDirection { forward, backward };

/// Unnormalized in-place DFTs of `rows` contiguous rows of length `len`.
/// forward uses exp(-j2pi kn/len), backward exp(+j2pi kn/len).
void dft_rows(std::span<cd> data, std::size_t rows, std::size_t len, FftDirection dir);

} // namespace refcal::detail
