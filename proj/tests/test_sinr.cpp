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

#include <mimo_grouping/channel_model.hpp>
#include <mimo_grouping/sinr.hpp>

#include <algorithm>
#include <random>

using namespace mimo_grouping;
using Catch::Approx;

namespace {

ChannelInstance manual_instance(std::size_t k, std::size_t m)
{
    ChannelInstance inst;
    inst.config.num_nodes = k;
    inst.config.num_antennas = m;
    inst.snr_linear = 100.0;
    inst.channel = ComplexMatrix(k, m);
    for (std::size_t i = 0; i < k; ++i) {
        inst.profiles.push_back({static_cast<NodeId>(i), 0.1 * static_cast<double>(i), 0.0});
    }
    return inst;
}

std::vector<Complex> random_row(std::size_t m, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Complex> h(m);
    for (auto& x : h) {
        x = Complex{n(rng), n(rng)};
    }
    return h;
}

} // namespace

TEST_CASE("MRC SINR on hand-built channels")
{
    SECTION("singleton group gets rho * ||h||^2")
    {
        auto inst = manual_instance(1, 100);
        for (std::size_t c = 0; c < 100; ++c) {
            inst.channel(0, c) = Complex{1.0, 0.0};
        }
        Partition p(1, 1, 1);
        const auto r = mrc_sinr(inst, p);
        CHECK(r.per_node_sinr_linear[0] == 10000.0);
        CHECK(r.per_node_sinr_db[0] == Approx(40.0).epsilon(1e-15));
    }
    SECTION("orthogonal channels do not interfere")
    {
        auto inst = manual_instance(2, 100);
        inst.channel(0, 0) = Complex{10.0, 0.0};
        inst.channel(1, 1) = Complex{0.0, 10.0};
        Partition p(2, 1, 2);
        const auto r = mrc_sinr(inst, p);
        CHECK(r.per_node_sinr_db[0] == Approx(40.0).epsilon(1e-15));
        CHECK(r.per_node_sinr_db[1] == Approx(40.0).epsilon(1e-15));
    }
    SECTION("identical channels")
    {
        auto inst = manual_instance(2, 100);
        for (std::size_t c = 0; c < 100; ++c) {
            inst.channel(0, c) = Complex{1.0, 0.0};
            inst.channel(1, c) = Complex{1.0, 0.0};
        }
        Partition p(2, 1, 2);
        const auto r = mrc_sinr(inst, p);
        CHECK(r.per_node_sinr_linear[0] == Approx(0.9999000099990001).epsilon(1e-14));
        CHECK(r.per_node_sinr_db[1] == Approx(-0.0004342727686267685).epsilon(1e-9));
        CHECK(r.min_db == r.max_db);
    }
    SECTION("only same-group nodes interfere")
    {
        auto inst = manual_instance(3, 4);
        for (std::size_t c = 0; c < 4; ++c) {
            inst.channel(0, c) = Complex{1.0, 0.0};
            inst.channel(1, c) = Complex{1.0, 0.0};
            inst.channel(2, c) = Complex{0.0, 1.0};
        }
        Partition p(3, 2, 2);
        p.group_of = {0, 1, 0};
        const auto r = mrc_sinr(inst, p);
        CHECK(r.per_node_sinr_linear[1] == 400.0); // alone in group 1
        CHECK(r.per_node_sinr_linear[0] < 1.0);
    }
    SECTION("invalid partitions are rejected")
    {
        auto inst = manual_instance(3, 4);
        Partition p(2, 1, 3);
        CHECK_THROWS_AS(mrc_sinr(inst, p), ConsistencyError);
    }
}

TEST_CASE("MRC SINR properties on random channels")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> count(0, 6);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    const std::size_t m = 16;
    const double rho = 100.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto target = random_row(m, rng);
        std::vector<std::vector<Complex>> rows;
        for (std::size_t j = 0, n = count(rng); j < n; ++j) {
            rows.push_back(random_row(m, rng));
        }
        std::vector<std::span<const Complex>> views(rows.begin(), rows.end());
        const double base = mrc_sinr_linear(target, views, rho);

        // One more interferer never helps.
        const auto extra = random_row(m, rng);
        auto more = views;
        more.push_back(extra);
        REQUIRE(mrc_sinr_linear(target, more, rho) <= base);

        // Unit-modulus rotation of any row changes nothing.
        const Complex rot = std::polar(1.0, phase(rng));
        auto rotated_target = target;
        for (auto& x : rotated_target) x *= rot;
        REQUIRE(mrc_sinr_linear(rotated_target, views, rho) == Approx(base).epsilon(1e-12));
        if (!rows.empty()) {
            auto rotated_rows = rows;
            for (auto& x : rotated_rows[0]) x *= rot;
            std::vector<std::span<const Complex>> rv(rotated_rows.begin(), rotated_rows.end());
            REQUIRE(mrc_sinr_linear(target, rv, rho) == Approx(base).epsilon(1e-12));
        }

        REQUIRE(mrc_sinr_linear(target, {}, rho) == rho * squared_norm(target));
    }
}

TEST_CASE("SinrReport aggregates")
{
    ExperimentConfig cfg;
    cfg.num_nodes = 9;
    cfg.rng_seed = 4;
    const auto inst = generate_instance(cfg);
    Partition p(9, 3, 3);
    p.group_of = {0, 1, 2, 0, 1, 2, 0, 1, 2};
    const auto r = mrc_sinr(inst, p);
    REQUIRE(r.per_node_sinr_db.size() == 9);
    CHECK(r.min_db == *std::min_element(r.per_node_sinr_db.begin(), r.per_node_sinr_db.end()));
    CHECK(r.max_db == *std::max_element(r.per_node_sinr_db.begin(), r.per_node_sinr_db.end()));
    CHECK(r.min_db <= r.mean_db);
    CHECK(r.mean_db <= r.max_db);
}

TEST_CASE("t interval")
{
    SECTION("identical samples")
    {
        const std::vector<double> xs(20, 7.25);
        const auto ci = t_interval(xs);
        CHECK(ci.defined);
        CHECK(ci.mean == 7.25);
        CHECK(ci.half_width == 0.0);
    }
    SECTION("two samples")
    {
        const std::vector<double> xs{10.0, 14.0};
        const auto ci = t_interval(xs);
        CHECK(ci.mean == 12.0);
        CHECK(ci.half_width == Approx(25.412409472864187).epsilon(1e-10));
    }
    SECTION("fewer than two samples is flagged")
    {
        const std::vector<double> one{3.0};
        const auto ci = t_interval(one);
        CHECK_FALSE(ci.defined);
        CHECK(ci.mean == 3.0);
        CHECK(std::isnan(ci.half_width));
        CHECK_FALSE(t_interval({}).defined);
    }
    SECTION("coverage is close to 95%")
    {
        std::mt19937_64 rng(12345);
        std::normal_distribution<double> n(3.0, 2.0);
        int covered = 0;
        const int trials = 4000;
        for (int t = 0; t < trials; ++t) {
            std::vector<double> xs(20);
            for (auto& x : xs) x = n(rng);
            const auto ci = t_interval(xs);
            covered += (ci.lower() <= 3.0 && 3.0 <= ci.upper()) ? 1 : 0;
        }
        CHECK(static_cast<double>(covered) / trials == Approx(0.95).margin(0.015));
    }
    SECTION("aggregate over reports")
    {
        std::vector<SinrReport> reports(2);
        reports[0].min_db = 10.0;
        reports[1].min_db = 14.0;
        const auto s = aggregate(reports);
        CHECK(s.min_db.mean == 12.0);
        CHECK(s.min_db.half_width == Approx(25.412409472864187).epsilon(1e-10));
        CHECK(s.max_db.half_width == 0.0);
    }
}
