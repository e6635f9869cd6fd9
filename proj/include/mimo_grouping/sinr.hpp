// SPDX-License-Identifier: Apache-2.0
//
// mimo-grouping: directional node grouping for massive MIMO
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

#include "channel_model.hpp"
#include "geometry.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace mimo_grouping {

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

struct SinrReport {
    std::vector<double> per_node_sinr_linear;
    std::vector<double> per_node_sinr_db; ///< indexed by node id
    double min_db = 0.0;
    double mean_db = 0.0;
    double max_db = 0.0;
};

/**
 * SINR of node k under uplink MRC with perfect CSI, where only the nodes in
 * `interferers` transmit alongside it:
 *
 *     rho ||h_k||^4 / (rho sum_j |h_k^H h_j|^2 + ||h_k||^2)
 *
 * evaluated as rho ||h_k||^2 / (rho I / ||h_k||^2 + 1) so that an empty
 * interferer set gives exactly rho ||h_k||^2.
 */
inline double mrc_sinr_linear(std::span<const Complex> target, std::span<const std::span<const Complex>> interferers,
                              double snr_linear)
{
    const double gain = squared_norm(target);
    double interference = 0.0;
    for (const auto& h : interferers) {
        interference += std::norm(inner_product(target, h));
    }
    return snr_linear * gain / (snr_linear * interference / gain + 1.0);
}

/// Per-node MRC SINR where each node is interfered with only by its own group.
inline SinrReport mrc_sinr(const ChannelInstance& instance, const Partition& p)
{
    const auto groups = members_by_group(instance.profiles, p);
    if (instance.channel.rows() != instance.num_nodes()) {
        throw ConsistencyError("channel rows do not match node count");
    }

    SinrReport report;
    const std::size_t k_total = instance.num_nodes();
    report.per_node_sinr_linear.assign(k_total, 0.0);
    report.per_node_sinr_db.assign(k_total, 0.0);

    std::vector<std::span<const Complex>> others;
    for (const auto& members : groups) {
        for (const NodeProfile& target : members) {
            others.clear();
            for (const NodeProfile& j : members) {
                if (j.id != target.id) {
                    others.push_back(instance.channel.row(j.id));
                }
            }
            const double s = mrc_sinr_linear(instance.channel.row(target.id), others, instance.snr_linear);
            report.per_node_sinr_linear[target.id] = s;
            report.per_node_sinr_db[target.id] = to_db(s);
        }
    }

    if (k_total > 0) {
        const auto [lo, hi] = std::minmax_element(report.per_node_sinr_db.begin(), report.per_node_sinr_db.end());
        report.min_db = *lo;
        report.max_db = *hi;
        report.mean_db = std::accumulate(report.per_node_sinr_db.begin(), report.per_node_sinr_db.end(), 0.0)
                         / static_cast<double>(k_total);
    }
    return report;
}

/// Sample mean with a two-sided Student-t confidence interval.
struct ConfidenceInterval {
    std::size_t n = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();
    double half_width = std::numeric_limits<double>::quiet_NaN();
    /// False when n < 2; mean is still set for n == 1.
    bool defined = false;

    [[nodiscard]] double lower() const noexcept { return mean - half_width; }
    [[nodiscard]] double upper() const noexcept { return mean + half_width; }
};

inline ConfidenceInterval t_interval(std::span<const double> samples, double level = 0.95)
{
    ConfidenceInterval ci;
    ci.n = samples.size();
    if (ci.n == 0) {
        return ci;
    }
    ci.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(ci.n);
    if (ci.n < 2) {
        return ci;
    }
    double ss = 0.0;
    for (double x : samples) {
        ss += (x - ci.mean) * (x - ci.mean);
    }
    ci.stddev = std::sqrt(ss / static_cast<double>(ci.n - 1));
    const boost::math::students_t dist(static_cast<double>(ci.n - 1));
    const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
    ci.half_width = t * ci.stddev / std::sqrt(static_cast<double>(ci.n));
    ci.defined = true;
    return ci;
}

/// Across-instance summary of the per-instance min/mean/max SINR.
struct SinrSummary {
    ConfidenceInterval min_db;
    ConfidenceInterval mean_db;
    ConfidenceInterval max_db;
};

inline SinrSummary aggregate(std::span<const SinrReport> reports, double level = 0.95)
{
    std::vector<double> mins, means, maxs;
    for (const SinrReport& r : reports) {
        mins.push_back(r.min_db);
        means.push_back(r.mean_db);
        maxs.push_back(r.max_db);
    }
    return SinrSummary{t_interval(mins, level), t_interval(means, level), t_interval(maxs, level)};
}

} // namespace mimo_grouping
