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

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mimo_grouping {

enum class Method { exact, approximation, clumped, power, brute_force };

inline constexpr std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::exact: return "exact";
    case Method::approximation: return "approximation";
    case Method::clumped: return "clumped";
    case Method::power: return "power";
    case Method::brute_force: return "brute_force";
    }
    return "unknown";
}

inline std::optional<Method> parse_method(std::string_view name) noexcept
{
    for (Method m : {Method::exact, Method::approximation, Method::clumped, Method::power, Method::brute_force}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

/// Raised by the brute-force oracle when the search space is too large.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PartitionResult {
    Partition partition;
    double objective_B = kPi;
    Method method = Method::approximation;
    double solve_time = 0.0; ///< seconds
    /// False only when the exact solver hit its time limit; the partition is then the best found.
    bool proven_optimal = true;
};

inline void check_capacity(std::size_t num_nodes, std::size_t groups, std::size_t capacity)
{
    if (groups == 0 || capacity == 0) {
        throw CapacityError("need at least one group and one pilot");
    }
    if (groups * capacity < num_nodes) {
        throw CapacityError(std::to_string(groups) + " groups x " + std::to_string(capacity)
                            + " pilots cannot hold " + std::to_string(num_nodes) + " nodes");
    }
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

inline PartitionResult finish(std::span<const NodeProfile> nodes, Partition p, Method m, Clock::time_point start)
{
    PartitionResult r;
    r.solve_time = seconds_since(start);
    r.objective_B = partition_objective(nodes, p).objective_B;
    r.partition = std::move(p);
    r.method = m;
    return r;
}

/// Balanced block sizes, earlier blocks larger by one when K % G != 0.
inline std::vector<std::size_t> block_sizes(std::size_t num_nodes, std::size_t groups)
{
    std::vector<std::size_t> sizes(groups, num_nodes / groups);
    for (std::size_t g = 0; g < num_nodes % groups; ++g) {
        ++sizes[g];
    }
    return sizes;
}

inline Partition assign_blocks(std::span<const NodeId> order, std::size_t groups, std::size_t capacity)
{
    Partition p(order.size(), groups, capacity);
    const auto sizes = block_sizes(order.size(), groups);
    std::size_t pos = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t i = 0; i < sizes[g]; ++i) {
            p.group_of[order[pos++]] = static_cast<GroupIndex>(g);
        }
    }
    return p;
}

// Odometer step over assignment vectors, last node fastest. False after the final vector.
inline bool next_assignment(std::vector<GroupIndex>& v, std::size_t groups)
{
    for (std::size_t pos = v.size(); pos-- > 0;) {
        if (++v[pos] < groups) {
            return true;
        }
        v[pos] = 0;
    }
    return false;
}

} // namespace detail

/**
 * Round-robin approximation.
 *
 * The node with the smallest theta - pi*sigma opens group 0. The rest are
 * ordered by theta + pi*sigma and dealt to groups 1, 2, ..., G-1, 0, 1, ...
 * Two sorts, so O(K log K). Ties go to the lower node id.
 */
inline PartitionResult approximate_partition(std::span<const NodeProfile> nodes, std::size_t groups,
                                             std::size_t capacity)
{
    const auto start = detail::Clock::now();
    check_capacity(nodes.size(), groups, capacity);
    validate_node_ids(nodes);

    Partition p(nodes.size(), groups, capacity);
    if (!nodes.empty()) {
        struct Keyed {
            double key;
            NodeId id;
        };
        std::vector<Keyed> order(nodes.size());
        const auto by_key = [](const Keyed& a, const Keyed& b) {
            return a.key < b.key || (a.key == b.key && a.id < b.id);
        };

        std::transform(nodes.begin(), nodes.end(), order.begin(),
                       [](const NodeProfile& n) { return Keyed{n.theta - n.max_shift(), n.id}; });
        const NodeId first = std::min_element(order.begin(), order.end(), by_key)->id;
        p.group_of[first] = 0;

        order.clear();
        for (const NodeProfile& n : nodes) {
            if (n.id != first) {
                order.push_back(Keyed{n.theta + n.max_shift(), n.id});
            }
        }
        std::sort(order.begin(), order.end(), by_key);

        std::size_t next = groups > 1 ? 1 : 0;
        for (const Keyed& k : order) {
            p.group_of[k.id] = static_cast<GroupIndex>(next);
            next = (next + 1) % groups;
        }
    }
    return detail::finish(nodes, std::move(p), Method::approximation, start);
}

/// Angularly adjacent nodes share a group: sort by theta, cut into balanced blocks.
inline PartitionResult clumped_partition(std::span<const NodeProfile> nodes, std::size_t groups,
                                         std::size_t capacity)
{
    const auto start = detail::Clock::now();
    check_capacity(nodes.size(), groups, capacity);
    validate_node_ids(nodes);

    std::vector<NodeProfile> sorted(nodes.begin(), nodes.end());
    std::sort(sorted.begin(), sorted.end(), angular_less);
    std::vector<NodeId> order(sorted.size());
    std::transform(sorted.begin(), sorted.end(), order.begin(), [](const NodeProfile& n) { return n.id; });
    return detail::finish(nodes, detail::assign_blocks(order, groups, capacity), Method::clumped, start);
}

namespace detail {

// Power rounded to a 30-bit mantissa (relative resolution ~1e-9), so rows
// normalised to the same energy compare equal despite last-bit noise.
inline std::pair<int, std::int64_t> power_key(double power)
{
    if (!(power > 0.0)) {
        return {std::numeric_limits<int>::min(), 0};
    }
    int exponent = 0;
    std::int64_t mantissa = std::llround(std::ldexp(std::frexp(power, &exponent), 30));
    if (mantissa == (std::int64_t{1} << 30)) {
        mantissa >>= 1;
        ++exponent;
    }
    return {exponent, mantissa};
}

} // namespace detail

/**
 * Nodes of similar received power share a group: sort by power descending
 * (ties by id), cut into balanced blocks. powers[id] is ||h_id||^2; powers
 * are compared at ~1e-9 relative resolution.
 */
inline PartitionResult power_partition(std::span<const NodeProfile> nodes, std::span<const double> powers,
                                       std::size_t groups, std::size_t capacity)
{
    const auto start = detail::Clock::now();
    check_capacity(nodes.size(), groups, capacity);
    validate_node_ids(nodes);
    if (powers.size() != nodes.size()) {
        throw ConsistencyError("power_partition: one power per node required");
    }

    std::vector<std::pair<int, std::int64_t>> key(nodes.size());
    std::transform(powers.begin(), powers.end(), key.begin(), detail::power_key);
    std::vector<NodeId> order(nodes.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return key[a] > key[b] || (key[a] == key[b] && a < b); });
    return detail::finish(nodes, detail::assign_blocks(order, groups, capacity), Method::power, start);
}

inline PartitionResult power_partition(const ChannelInstance& instance, std::size_t groups, std::size_t capacity)
{
    const auto powers = instance.row_powers();
    return power_partition(instance.profiles, powers, groups, capacity);
}

/// Largest G^K the brute-force oracle agrees to enumerate.
inline constexpr double kBruteForceLimit = 1e8;

/**
 * Exhaustive oracle: every capacity-feasible assignment vector in
 * lexicographic order (node 0 most significant). Returns the first one that
 * attains the maximal objective.
 */
inline PartitionResult brute_force_partition(std::span<const NodeProfile> nodes, std::size_t groups,
                                             std::size_t capacity)
{
    const auto start = detail::Clock::now();
    check_capacity(nodes.size(), groups, capacity);
    validate_node_ids(nodes);
    const double space = std::pow(static_cast<double>(groups), static_cast<double>(nodes.size()));
    if (space > kBruteForceLimit) {
        throw SizeError("brute force refuses " + std::to_string(groups) + "^" + std::to_string(nodes.size())
                        + " assignments");
    }

    Partition candidate(nodes.size(), groups, capacity);
    Partition best = candidate;
    double best_value = -1.0;
    std::vector<std::size_t> sizes(groups, 0);
    do {
        std::fill(sizes.begin(), sizes.end(), 0);
        bool feasible = true;
        for (GroupIndex g : candidate.group_of) {
            if (++sizes[g] > capacity) {
                feasible = false;
                break;
            }
        }
        if (feasible) {
            const double v = partition_objective(nodes, candidate).objective_B;
            if (v > best_value) {
                best_value = v;
                best = candidate;
            }
        }
    } while (detail::next_assignment(candidate.group_of, groups));

    PartitionResult r;
    r.partition = std::move(best);
    r.objective_B = best_value < 0.0 ? kPi : best_value;
    r.method = Method::brute_force;
    r.solve_time = detail::seconds_since(start);
    return r;
}

struct ExactOptions {
    /// Wall-clock budget; when exceeded the best partition found so far is returned unproven.
    std::optional<double> time_limit_seconds;
};

namespace detail {

/**
 * Depth-first branch and bound. Nodes are visited in angular order, so every
 * node dropped into a non-empty group becomes that group's new last member
 * and the gap it closes is final. The bound at a search node is the minimum
 * of the committed gaps together with an upper bound on each group's
 * eventual wraparound gap.
 */
class ExactSearch {
public:
    ExactSearch(std::span<const NodeProfile> nodes, std::size_t groups, std::size_t capacity,
                const ExactOptions& options)
        : sorted_(nodes.begin(), nodes.end()), groups_(groups), capacity_(capacity), options_(options),
          start_(Clock::now())
    {
        std::sort(sorted_.begin(), sorted_.end(), angular_less);
        suffix_max_shift_.assign(sorted_.size() + 1, 0.0);
        for (std::size_t i = sorted_.size(); i-- > 0;) {
            suffix_max_shift_[i] = std::max(suffix_max_shift_[i + 1], sorted_[i].max_shift());
        }
        first_.assign(groups, kNone);
        last_.assign(groups, kNone);
        size_.assign(groups, 0);
        assignment_.assign(sorted_.size(), 0);
    }

    void seed_incumbent(const Partition& p, double value)
    {
        best_value_ = value;
        best_ = p;
    }

    void run()
    {
        if (!sorted_.empty()) {
            descend(0, kPi, 0);
        }
    }

    [[nodiscard]] bool timed_out() const noexcept { return timed_out_; }
    [[nodiscard]] double best_value() const noexcept { return best_value_; }
    [[nodiscard]] const Partition& best() const noexcept { return best_; }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    struct Child {
        double bound;
        std::size_t group;
    };

    bool out_of_time()
    {
        if (timed_out_) {
            return true;
        }
        if (!options_.time_limit_seconds || (++ticks_ & 0x3ff) != 0) {
            return false;
        }
        timed_out_ = seconds_since(start_) > *options_.time_limit_seconds;
        return timed_out_;
    }

    // Upper bound on group g's closing gap given that nodes from `next` on are still unplaced.
    double wrap_bound(std::size_t g, std::size_t next) const
    {
        if (size_[g] < 2) {
            return kPi;
        }
        const NodeProfile& first = sorted_[first_[g]];
        const NodeProfile& last = sorted_[last_[g]];
        const double last_shift = std::max(last.max_shift(), suffix_max_shift_[next]);
        return std::min(kPi, first.theta + kTwoPi - last.theta + first.max_shift() + last_shift);
    }

    double closing_value(std::size_t g) const
    {
        if (size_[g] < 2) {
            return kPi;
        }
        const NodeProfile& first = sorted_[first_[g]];
        const NodeProfile& last = sorted_[last_[g]];
        return adjusted_gap(last, first, first.theta + kTwoPi - last.theta);
    }

    void record_leaf(double committed)
    {
        double v = committed;
        for (std::size_t g = 0; g < groups_; ++g) {
            v = std::min(v, closing_value(g));
        }
        if (v > best_value_) {
            best_value_ = v;
            best_ = Partition(sorted_.size(), groups_, capacity_);
            for (std::size_t i = 0; i < sorted_.size(); ++i) {
                best_.group_of[sorted_[i].id] = static_cast<GroupIndex>(assignment_[i]);
            }
        }
    }

    void descend(std::size_t i, double committed, std::size_t opened)
    {
        if (out_of_time()) {
            return;
        }
        if (i == sorted_.size()) {
            record_leaf(committed);
            return;
        }
        const NodeProfile& node = sorted_[i];

        std::vector<Child> children;
        children.reserve(groups_);
        for (std::size_t g = 0; g < std::min(groups_, opened + 1); ++g) {
            if (size_[g] == capacity_) {
                continue;
            }
            double bound = committed;
            if (size_[g] > 0) {
                const NodeProfile& prev = sorted_[last_[g]];
                bound = std::min(bound, adjusted_gap(prev, node, node.theta - prev.theta));
            }
            if (bound <= best_value_) {
                continue;
            }
            children.push_back(Child{bound, g});
        }
        std::stable_sort(children.begin(), children.end(),
                         [](const Child& a, const Child& b) { return a.bound > b.bound; });

        for (const Child& c : children) {
            if (c.bound <= best_value_ || timed_out_) {
                continue;
            }
            const std::size_t g = c.group;
            const std::size_t saved_first = first_[g];
            const std::size_t saved_last = last_[g];
            if (size_[g] == 0) {
                first_[g] = i;
            }
            last_[g] = i;
            ++size_[g];
            assignment_[i] = g;

            double bound = c.bound;
            for (std::size_t h = 0; h < groups_ && bound > best_value_; ++h) {
                bound = std::min(bound, wrap_bound(h, i + 1));
            }
            if (bound > best_value_) {
                descend(i + 1, c.bound, std::max(opened, g + 1));
            }

            --size_[g];
            first_[g] = saved_first;
            last_[g] = saved_last;
        }
    }

    std::vector<NodeProfile> sorted_;
    std::size_t groups_;
    std::size_t capacity_;
    ExactOptions options_;
    Clock::time_point start_;
    std::vector<double> suffix_max_shift_;
    std::vector<std::size_t> first_;
    std::vector<std::size_t> last_;
    std::vector<std::size_t> size_;
    std::vector<std::size_t> assignment_;
    Partition best_;
    double best_value_ = -1.0;
    std::size_t ticks_ = 0;
    bool timed_out_ = false;
};

} // namespace detail

/**
 * Partition maximising the minimum adjusted gap over all groups.
 *
 * Branch and bound seeded with the round-robin approximation, so the result
 * is never worse than approximate_partition. Groups are interchangeable, so
 * a node may only open the lowest-numbered empty group. Single-threaded and
 * deterministic.
 */
inline PartitionResult exact_partition(std::span<const NodeProfile> nodes, std::size_t groups,
                                       std::size_t capacity, const ExactOptions& options = {})
{
    const auto start = detail::Clock::now();
    check_capacity(nodes.size(), groups, capacity);
    validate_node_ids(nodes);

    const PartitionResult seed = approximate_partition(nodes, groups, capacity);
    detail::ExactSearch search(nodes, groups, capacity, options);
    search.seed_incumbent(seed.partition, seed.objective_B);
    search.run();

    PartitionResult r;
    r.partition = search.best();
    r.objective_B = partition_objective(nodes, r.partition).objective_B;
    r.method = Method::exact;
    r.proven_optimal = !search.timed_out();
    r.solve_time = detail::seconds_since(start);
    return r;
}

} // namespace mimo_grouping
