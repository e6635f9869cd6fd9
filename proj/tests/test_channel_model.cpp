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

#include <cmath>

using namespace mimo_grouping;
using Catch::Approx;

namespace {

ClusterSpec cluster_at(double deg, double power)
{
    ClusterSpec c;
    c.central_azimuth = deg_to_rad(deg);
    c.power = power;
    return c;
}

} // namespace

TEST_CASE("steering vector")
{
    const ArrayGeometry ura{10, 10, 0.5};

    SECTION("broadside is all ones")
    {
        const auto a = steering_vector(kPi / 2, kPi / 2, ura, 100);
        REQUIRE(a.size() == 100);
        for (const auto& x : a) {
            CHECK(x.real() == Approx(1.0).margin(1e-12));
            CHECK(x.imag() == Approx(0.0).margin(1e-12));
        }
    }
    SECTION("unit modulus everywhere")
    {
        for (double az : {0.0, 0.3, 1.2, 2.9}) {
            for (double el : {0.0, 0.7, 1.5, 2.4}) {
                for (const auto& x : steering_vector(az, el, ura)) {
                    CHECK(std::abs(x) == Approx(1.0).epsilon(1e-14));
                }
            }
        }
    }
    SECTION("half-wavelength endfire gives a phase step of pi")
    {
        // Two elements along the columns, arrival along that axis.
        const auto row_pair = steering_vector(0.0, kPi / 2, ArrayGeometry{1, 2, 0.5});
        const Complex step = row_pair[1] / row_pair[0];
        CHECK(step.real() == Approx(-1.0).margin(1e-12));
        CHECK(step.imag() == Approx(0.0).margin(1e-12));

        // Two elements along the rows, arrival along that axis.
        const auto col_pair = steering_vector(kPi / 2, 0.0, ArrayGeometry{2, 1, 0.5});
        const Complex step2 = col_pair[1] / col_pair[0];
        CHECK(step2.real() == Approx(-1.0).margin(1e-12));
        CHECK(std::abs(std::arg(step2)) == Approx(kPi).margin(1e-12));
    }
    SECTION("geometry must match the antenna count")
    {
        CHECK_THROWS_AS(steering_vector(0.0, 0.0, ura, 64), ConfigError);
    }
}

TEST_CASE("cluster angular spread")
{
    const std::vector<ClusterSpec> wide{cluster_at(45, 1), cluster_at(135, 1)};
    CHECK(cluster_angular_spread(wide) == Approx(0.25).epsilon(1e-15));

    const std::vector<ClusterSpec> same{cluster_at(70, 1), cluster_at(70, 2), cluster_at(70, 3)};
    CHECK(cluster_angular_spread(same) == 0.0);

    const std::vector<ClusterSpec> three{cluster_at(80, 1), cluster_at(60, 1), cluster_at(100, 1)};
    CHECK(cluster_angular_spread(three) == Approx(0.1111111111111111).epsilon(1e-14));

    CHECK_THROWS_AS(cluster_angular_spread({}), std::domain_error);
}

TEST_CASE("angular spread from cluster powers")
{
    SECTION("weak dominant cluster")
    {
        const std::vector<ClusterSpec> c{cluster_at(45, 0.4), cluster_at(135, 0.2), cluster_at(90, 0.2),
                                         cluster_at(100, 0.2)};
        CHECK(angular_spread(c) == Approx(0.08333333333333331).epsilon(1e-13));
    }
    SECTION("dominant at least the rest clamps to zero")
    {
        const std::vector<ClusterSpec> c{cluster_at(45, 3.0), cluster_at(135, 1.0), cluster_at(90, 1.0),
                                         cluster_at(100, 1.0)};
        CHECK(angular_spread(c) == 0.0);
        const std::vector<ClusterSpec> equal{cluster_at(45, 1.0), cluster_at(135, 1.0)};
        CHECK(angular_spread(equal) == 0.0);
    }
    SECTION("vanishing dominant power approaches psi")
    {
        CHECK(spread_from_powers(0.25, 1e-12, 0.6) == Approx(0.25).epsilon(1e-10));
        CHECK(spread_from_powers(0.25, 0.0, 0.6) == 0.25);
    }
    SECTION("needs at least two clusters")
    {
        const std::vector<ClusterSpec> one{cluster_at(90, 1.0)};
        CHECK_THROWS_AS(angular_spread(one), std::domain_error);
    }
}

TEST_CASE("generate_instance follows the configured model")
{
    ExperimentConfig cfg;
    cfg.num_nodes = 15;
    cfg.rng_seed = 42;
    const auto inst = generate_instance(cfg);

    REQUIRE(inst.channel.rows() == 15);
    REQUIRE(inst.channel.cols() == 100);
    REQUIRE(inst.profiles.size() == 15);
    REQUIRE(inst.clusters.size() == 15);
    CHECK(inst.snr_linear == Approx(100.0).epsilon(1e-14));

    const auto powers = inst.row_powers();
    for (std::size_t k = 0; k < 15; ++k) {
        const auto& p = inst.profiles[k];
        CHECK(p.id == k);
        CHECK(p.theta >= deg_to_rad(45.0));
        CHECK(p.theta <= deg_to_rad(135.0));
        CHECK(p.sigma >= 0.0);
        CHECK(p.sigma <= 1.0);
        CHECK(powers[k] / 100.0 == Approx(1.0).epsilon(1e-13));

        REQUIRE(inst.clusters[k].size() == 4);
        for (const auto& c : inst.clusters[k]) {
            CHECK(c.components.size() == 10);
        }
        // theta is the central angle of the strongest cluster.
        const std::size_t dom = dominant_cluster(inst.clusters[k]);
        CHECK(p.theta == inst.clusters[k][dom].central_azimuth);
        CHECK(p.sigma == angular_spread(inst.clusters[k]));
    }
}

TEST_CASE("generate_instance is reproducible from the seed")
{
    ExperimentConfig cfg;
    cfg.num_nodes = 6;
    cfg.rng_seed = 99;
    const auto a = generate_instance(cfg);
    const auto b = generate_instance(cfg);
    CHECK(a.channel == b.channel);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(a.profiles[k].theta == b.profiles[k].theta);
        CHECK(a.profiles[k].sigma == b.profiles[k].sigma);
    }
    cfg.rng_seed = 100;
    const auto c = generate_instance(cfg);
    CHECK_FALSE(a.channel == c.channel);
}

TEST_CASE("component offsets are exponential with the configured mean")
{
    ExperimentConfig cfg;
    cfg.num_nodes = 2500; // 10^5 components
    cfg.num_antennas = 4;
    cfg.array = ArrayGeometry{2, 2, 0.5};
    cfg.rng_seed = 5;
    const auto inst = generate_instance(cfg);

    double sum_az = 0.0;
    double sum_el = 0.0;
    std::size_t n = 0;
    std::size_t negative = 0;
    for (const auto& node : inst.clusters) {
        for (const auto& c : node) {
            for (const auto& comp : c.components) {
                sum_az += std::fabs(comp.azimuth_offset);
                sum_el += std::fabs(comp.elevation_offset);
                negative += comp.azimuth_offset < 0.0 ? 1 : 0;
                ++n;
            }
        }
    }
    REQUIRE(n == 100000);
    CHECK(rad_to_deg(sum_az / n) == Approx(7.5).epsilon(0.02));
    CHECK(rad_to_deg(sum_el / n) == Approx(7.5).epsilon(0.02));
    CHECK(static_cast<double>(negative) / n == Approx(0.5).epsilon(0.02));
}

TEST_CASE("invalid configurations are rejected")
{
    ExperimentConfig cfg;
    cfg.num_antennas = 64;
    CHECK_THROWS_AS(generate_instance(cfg), ConfigError);

    cfg = ExperimentConfig{};
    cfg.central_angle_max_deg = 200.0;
    CHECK_THROWS_AS(generate_instance(cfg), ConfigError);

    cfg = ExperimentConfig{};
    cfg.num_nodes = 0;
    CHECK_THROWS_AS(generate_instance(cfg), ConfigError);

    cfg = ExperimentConfig{};
    cfg.num_clusters = 1;
    CHECK_THROWS_AS(generate_instance(cfg), ConfigError);
}
