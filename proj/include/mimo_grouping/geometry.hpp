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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimo_grouping {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using NodeId = std::uint32_t;
using GroupIndex = std::uint32_t;

/// Raised when a partition does not fit the node set it is evaluated against.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when G * P cannot hold every node.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Long-term directional descriptor of one node.
 *
 * theta is the dominant direction in radians, clockwise from the reference
 * direction, in [0, 2pi). sigma is the normalised angular spectrum spread in
 * [0, 1]: 0 for a single arrival direction, 1 for an isotropic channel.
 */
struct NodeProfile {
    NodeId id = 0;
    double theta = 0.0;
    double sigma = 0.0;

    /// Throws std::domain_error unless 0 <= theta < 2pi and 0 <= sigma <= 1.
    void validate() const
    {
        if (!(theta >= 0.0 && theta < kTwoPi)) {
            throw std::domain_error("node " + std::to_string(id) + ": theta outside [0, 2pi)");
        }
        if (!(sigma >= 0.0 && sigma <= 1.0)) {
            throw std::domain_error("node " + std::to_string(id) + ": sigma outside [0, 1]");
        }
    }

    /// Largest symbolic shift the node may take around the circle.
    [[nodiscard]] double max_shift() const noexcept { return kPi * sigma; }
};

/// Angular ordering used throughout: theta ascending, then id ascending.
inline bool angular_less(const NodeProfile& a, const NodeProfile& b) noexcept
{
    if (a.theta != b.theta) {
        return a.theta < b.theta;
    }
    return a.id < b.id;
}

/**
 * Assignment of nodes to groups.
 *
 * group_of[id] is the 0-based group of node `id`; node ids are expected to be
 * dense (0 .. K-1). At most `capacity` nodes share a group.
 */
struct Partition {
    std::vector<GroupIndex> group_of;
    std::size_t num_groups = 1;
    std::size_t capacity = 1;

    Partition() = default;
    Partition(std::size_t num_nodes, std::size_t groups, std::size_t cap)
        : group_of(num_nodes, 0), num_groups(groups), capacity(cap)
    {
    }

    [[nodiscard]] std::size_t num_nodes() const noexcept { return group_of.size(); }

    [[nodiscard]] std::vector<std::size_t> group_sizes() const
    {
        std::vector<std::size_t> sizes(num_groups, 0);
        for (GroupIndex g : group_of) {
            if (g < num_groups) {
                ++sizes[g];
            }
        }
        return sizes;
    }

    /// Throws ConsistencyError on out-of-range groups, CapacityError on overfull ones.
    void validate() const
    {
        if (num_groups == 0 || capacity == 0) {
            throw ConsistencyError("partition needs at least one group and capacity >= 1");
        }
        for (std::size_t k = 0; k < group_of.size(); ++k) {
            if (group_of[k] >= num_groups) {
                throw ConsistencyError("node " + std::to_string(k) + " assigned to group "
                                       + std::to_string(group_of[k]) + " of "
                                       + std::to_string(num_groups));
            }
        }
        for (std::size_t size : group_sizes()) {
            if (size > capacity) {
                throw CapacityError("group holds " + std::to_string(size) + " nodes, capacity is "
                                    + std::to_string(capacity));
            }
        }
    }
};

/// Per-group values in [0, pi] and their minimum, the objective B.
struct GroupEvaluation {
    std::vector<double> per_group_value;
    double objective_B = kPi;
};

/**
 * Angular difference between two circularly adjacent group members after
 * each is shifted by its full tolerance pi*sigma, capped at pi.
 *
 * The shifts enter every difference with positive sign and are bounded above
 * by pi*sigma, so the best shift is always the bound itself.
 */
inline double adjusted_gap(const NodeProfile& a, const NodeProfile& b, double raw_gap)
{
    if (!(raw_gap >= 0.0)) {
        throw std::domain_error("adjusted_gap: raw gap must be non-negative");
    }
    return std::min(kPi, raw_gap + a.max_shift() + b.max_shift());
}

namespace detail {

// Members must already be in angular order.
inline double sorted_group_value(std::span<const NodeProfile> sorted)
{
    if (sorted.size() <= 1) {
        return kPi;
    }
    double value = kPi;
    for (std::size_t p = 0; p + 1 < sorted.size(); ++p) {
        value = std::min(value, adjusted_gap(sorted[p], sorted[p + 1], sorted[p + 1].theta - sorted[p].theta));
    }
    const NodeProfile& first = sorted.front();
    const NodeProfile& last = sorted.back();
    return std::min(value, adjusted_gap(last, first, first.theta + kTwoPi - last.theta));
}

} // namespace detail

/**
 * Minimum adjusted gap over circularly consecutive members of one group.
 * Empty and singleton groups are bounded only by the cap, pi.
 */
inline double group_value(std::span<const NodeProfile> members)
{
    if (members.size() <= 1) {
        return kPi;
    }
    std::vector<NodeProfile> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end(), angular_less);
    return detail::sorted_group_value(sorted);
}

/// Checks that `nodes` carries each id 0 .. K-1 exactly once.
inline void validate_node_ids(std::span<const NodeProfile> nodes)
{
    std::vector<bool> seen(nodes.size(), false);
    for (const NodeProfile& n : nodes) {
        if (n.id >= nodes.size() || seen[n.id]) {
            throw ConsistencyError("node ids must be a permutation of 0.."
                                   + std::to_string(nodes.size()) + "-1 (offending id "
                                   + std::to_string(n.id) + ")");
        }
        seen[n.id] = true;
    }
}

/// Splits nodes by group, each group in angular order.
inline std::vector<std::vector<NodeProfile>> members_by_group(std::span<const NodeProfile> nodes,
                                                              const Partition& p)
{
    if (p.num_nodes() != nodes.size()) {
        throw ConsistencyError("partition covers " + std::to_string(p.num_nodes()) + " nodes, instance has "
                               + std::to_string(nodes.size()));
    }
    validate_node_ids(nodes);
    p.validate();
    std::vector<std::vector<NodeProfile>> groups(p.num_groups);
    for (const NodeProfile& n : nodes) {
        groups[p.group_of[n.id]].push_back(n);
    }
    for (auto& g : groups) {
        std::sort(g.begin(), g.end(), angular_less);
    }
    return groups;
}

inline GroupEvaluation partition_objective(std::span<const NodeProfile> nodes, const Partition& p)
{
    GroupEvaluation eval;
    const auto groups = members_by_group(nodes, p);
    eval.per_group_value.reserve(groups.size());
    for (const auto& members : groups) {
        const double v = detail::sorted_group_value(members);
        eval.per_group_value.push_back(v);
        eval.objective_B = std::min(eval.objective_B, v);
    }
    return eval;
}

} // namespace mimo_grouping
