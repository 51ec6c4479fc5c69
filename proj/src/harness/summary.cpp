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

#include "refcal/harness/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "refcal/error.hpp"

namespace refcal::harness {

double percentile_nearest_rank(const std::vector<double>& sorted, double pct)
{
    if (sorted.empty()) throw Error("percentile_nearest_rank: empty sample");
    const double n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

Summary summarize(const std::vector<TrialRecord>& records)
{
    struct Metric {
        const char* name;
        double TrialRecord::*field;
    };
    static constexpr Metric metrics[] = {
        {"sync_error_s", &TrialRecord::sync_error_s},
        {"localization_error_m", &TrialRecord::localization_error_m},
        {"aoa_error_rad", &TrialRecord::aoa_error_rad},
    };

    std::vector<double> snrs;
    for (const auto& r : records)
        if (std::ranges::find(snrs, r.snr_db) == snrs.end()) snrs.push_back(r.snr_db);

    Summary out;
    for (const auto& r : records)
        if (!r.reference_found) ++out.reference_not_found;

    for (double snr : snrs) {
        for (const auto& metric : metrics) {
            MetricSummary s;
            s.metric = metric.name;
            s.snr_db = snr;
            std::vector<double> values;
            for (const auto& r : records) {
                if (r.snr_db != snr) continue;
                if (r.ok() && std::isfinite(r.*metric.field)) values.push_back(r.*metric.field);
                else ++s.failed;
            }
            std::ranges::sort(values);
            s.count = values.size();

            CdfTable cdf{metric.name, snr, {}};
            if (!values.empty()) {
                s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
                s.p50 = percentile_nearest_rank(values, 50);
                s.p80 = percentile_nearest_rank(values, 80);
                s.p95 = percentile_nearest_rank(values, 95);
                s.max = values.back();
                for (std::size_t i = 0; i < values.size(); ++i)
                    cdf.points.emplace_back(values[i], static_cast<double>(i + 1) / static_cast<double>(values.size()));
            }
            out.metrics.push_back(s);
            out.cdfs.push_back(std::move(cdf));
        }
    }
    return out;
}

} // namespace refcal::harness
