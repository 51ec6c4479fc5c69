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
#include <string>
#include <utility>
#include <vector>

#include "refcal/harness/scenario.hpp"

namespace refcal::harness {

/// Nearest-rank percentile of an ascending-sorted, non-empty sample: the value at rank ceil(pct/100 * n).
double percentile_nearest_rank(const std::vector<double>& sorted, double pct);

struct MetricSummary {
    std::string metric;
    double snr_db = 0.0;
    std::size_t count = 0;   ///< successful trials
    std::size_t failed = 0;  ///< trials without an estimate (reference not found, target missing, ...)
    double mean = 0.0;
    double p50 = 0.0;
    double p80 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

/// Empirical CDF: (value, fraction of samples <= value), one point per sample.
struct CdfTable {
    std::string metric;
    double snr_db = 0.0;
    std::vector<std::pair<double, double>> points;
};

struct Summary {
    std::vector<MetricSummary> metrics;
    std::vector<CdfTable> cdfs;
    std::size_t reference_not_found = 0;
};

/// Per SNR, summaries of sync_error_s, localization_error_m and aoa_error_rad over the successful trials.
Summary summarize(const std::vector<TrialRecord>& records);

} // namespace refcal::harness
