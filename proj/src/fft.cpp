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

#include "fft.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>

#include "refcal/error.hpp"

namespace refcal::detail {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* plan) const
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
};

} // namespace

void dft_rows(std::span<cd> data, std::size_t rows, std::size_t len, FftDirection dir)
{
    if (rows == 0 || len == 0) return;
    if (data.size() != rows * len) throw EstimationError("dft_rows: buffer size mismatch");

    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    const int n = static_cast<int>(len);
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        // FFTW_ESTIMATE never touches the buffer while planning.
        plan.reset(fftw_plan_many_dft(1, &n, static_cast<int>(rows), buf, nullptr, 1, n, buf, nullptr, 1, n,
                                      dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED));
    }
    if (!plan) throw EstimationError("dft_rows: FFTW planning failed");
    fftw_execute(plan.get());
}

} // namespace refcal::detail
