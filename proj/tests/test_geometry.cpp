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

#include <catch2/catch_amalgamated.hpp>

#include <mimo_grouping/geometry.hpp>

#include "support/random_nodes.hpp"

#include <algorithm>
#include <random>

using namespace mimo_grouping;
using Catch::Approx;

TEST_CASE("adjusted_gap adds both tolerances and caps at pi")
{
    const NodeProfile still{0, 0.0, 0.0};
    const NodeProfile spread{1, 0.0, 1.0};
    const NodeProfile slight{2, 0.0, 0.1};

    CHECK(adjusted_gap(still, still, 1.0) == 1.0);
    CHECK(adjusted_gap(spread, still, 0.5) == kPi);
    CHECK(adjusted_gap(slight, slight, kPi / 2) == Approx(2.199114857512855).epsilon(1e-15));
    CHECK_THROWS_AS(adjusted_gap(still, still, -1e-12), std::domain_error);
}

TEST_CASE("group_value on hand-checked groups")
{
    SECTION("empty and singleton groups are bounded by the cap")
    {
        CHECK(group_value({}) == kPi);
        const NodeProfile one{0, 1.0, 0.0};
        CHECK(group_value(std::span(&one, 1)) == kPi);
    }
    SECTION("square")
    {
        const std::vector<NodeProfile> sq{{0, 0.0, 0.0}, {1, kPi / 2, 0.0}, {2, kPi, 0.0}, {3, 3 * kPi / 2, 0.0}};
        CHECK(group_value(sq) == Approx(kPi / 2).epsilon(1e-15));
    }
    SECTION("close pair: the short gap wins, the long way round is capped")
    {
        const std::vector<NodeProfile> pair{{0, 0.0, 0.0}, {1, 0.1, 0.0}};
        CHECK(group_value(pair) == Approx(0.1).epsilon(1e-15));
    }
    SECTION("wraparound gap can be the binding one")
    {
        const std::vector<NodeProfile> g{{0, 0.2, 0.0}, {1, 3.0, 0.0}, {2, 6.2, 0.0}};
        CHECK(group_value(g) == Approx(0.2 + kTwoPi - 6.2).epsilon(1e-12));
    }
}

TEST_CASE("partition_objective")
{
    std::vector<NodeProfile> hex;
    for (NodeId k = 0; k < 6; ++k) {
        hex.push_back({k, k * kPi / 3, 0.0});
    }

    SECTION("alternating split of a hexagon")
    {
        Partition p(6, 2, 3);
        p.group_of = {0, 1, 0, 1, 0, 1};
        const auto e = partition_objective(hex, p);
        CHECK(e.objective_B == Approx(2.094395102393195).epsilon(1e-14));
        REQUIRE(e.per_group_value.size() == 2);
        CHECK(e.objective_B == std::min(e.per_group_value[0], e.per_group_value[1]));
    }
    SECTION("coincident nodes in one group give zero")
    {
        std::vector<NodeProfile> nodes{{0, 1.0, 0.0}, {1, 1.0, 0.0}, {2, 2.0, 0.0}};
        Partition p(3, 2, 2);
        p.group_of = {0, 0, 1};
        CHECK(partition_objective(nodes, p).objective_B == 0.0);
    }
    SECTION("all singletons")
    {
        std::vector<NodeProfile> nodes{{0, 1.0, 0.0}, {1, 1.0, 0.0}, {2, 2.0, 0.0}};
        Partition p(3, 3, 1);
        p.group_of = {0, 1, 2};
        CHECK(partition_objective(nodes, p).objective_B == kPi);
    }
    SECTION("inconsistent partitions are rejected")
    {
        Partition short_p(5, 2, 3);
        CHECK_THROWS_AS(partition_objective(hex, short_p), ConsistencyError);
        Partition bad_group(6, 2, 3);
        bad_group.group_of = {0, 1, 0, 1, 0, 7};
        CHECK_THROWS_AS(partition_objective(hex, bad_group), ConsistencyError);
        Partition overfull(6, 2, 2);
        overfull.group_of = {0, 1, 0, 1, 0, 1};
        CHECK_THROWS_AS(partition_objective(hex, overfull), CapacityError);
        auto dup = hex;
        dup[5].id = 4;
        Partition ok(6, 2, 3);
        ok.group_of = {0, 1, 0, 1, 0, 1};
        CHECK_THROWS_AS(partition_objective(dup, ok), ConsistencyError);
    }
}

TEST_CASE("NodeProfile validation")
{
    CHECK_NOTHROW(NodeProfile{0, 0.0, 0.0}.validate());
    CHECK_NOTHROW(NodeProfile{0, 6.28, 1.0}.validate());
    CHECK_THROWS_AS((NodeProfile{0, kTwoPi, 0.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((NodeProfile{0, -0.1, 0.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((NodeProfile{0, 1.0, 1.5}.validate()), std::domain_error);
}

// Any shift vector with s_p <= pi*sigma_p, negative entries included, does no
// better than the closed form.
TEST_CASE("shift collapse: the full tolerance is the optimal shift")
{
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> size(2, 12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        auto members = test_support::random_nodes(size(rng), rng, 1.0);
        const double best = group_value(members);
        std::sort(members.begin(), members.end(), angular_less);
        for (int draw = 0; draw < 4; ++draw) {
            std::vector<double> s(members.size());
            for (std::size_t p = 0; p < s.size(); ++p) {
                s[p] = members[p].max_shift() - 2.0 * kPi * unit(rng) * unit(rng);
            }
            double v = kPi;
            for (std::size_t p = 0; p + 1 < members.size(); ++p) {
                v = std::min(v, std::min(kPi, members[p + 1].theta - members[p].theta + s[p] + s[p + 1]));
            }
            v = std::min(v, std::min(kPi, members.front().theta + kTwoPi - members.back().theta + s.front() + s.back()));
            REQUIRE(v <= best + 1e-15);
        }
    }
}

TEST_CASE("group_value invariances")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> size(0, 10);
    std::uniform_real_distribution<double> offset(0.0, kTwoPi);
    for (int trial = 0; trial < 300; ++trial) {
        auto g = test_support::random_nodes(size(rng), rng, 0.3);
        const double v = group_value(g);
        CHECK(v >= 0.0);
        CHECK(v <= kPi);

        auto shuffled = g;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(group_value(shuffled) == v);

        auto rotated = g;
        const double off = offset(rng);
        for (auto& n : rotated) {
            n.theta = std::fmod(n.theta + off, kTwoPi);
        }
        CHECK(group_value(rotated) == Approx(v).margin(1e-12));

        if (!g.empty()) {
            auto wider = g;
            auto& n = wider[trial % wider.size()];
            n.sigma = std::min(1.0, n.sigma + 0.2 * (trial % 5));
            CHECK(group_value(wider) >= v);
        }
    }
}
