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
//
// Clustered multipath channel generator for K single-antenna nodes and an
// M-element uniform rectangular array (Saleh-Valenzuela style clusters).
//
// Array convention: element (r, c) sits at row r, column c of the array,
// with flat antenna index r * cols + c. For an arrival at azimuth `az` and
// elevation `el` the element response is
//
//     exp(j * 2pi * spacing * (r * cos(el) + c * sin(el) * cos(az)))
//
// so azimuth 90 deg / elevation 90 deg is broadside (all phases zero),
// azimuth 0 with elevation 90 deg is endfire along the columns, and
// elevation 0 is endfire along the rows.

#pragma once

#include "geometry.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimo_grouping {

using Complex = std::complex<double>;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

struct ArrayGeometry {
    std::size_t rows = 10;
    std::size_t cols = 10;
    double spacing = 0.5; ///< element spacing in wavelengths

    [[nodiscard]] std::size_t size() const noexcept { return rows * cols; }
};

/// Dense row-major complex matrix; row k is node k's channel to every antenna.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Squared Euclidean norm of a channel row.
inline double squared_norm(std::span<const Complex> v) noexcept
{
    double s = 0.0;
    for (const Complex& x : v) {
        s += std::norm(x);
    }
    return s;
}

/// a^H b
inline Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) noexcept
{
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

struct ClusterComponent {
    double azimuth_offset = 0.0;
    double elevation_offset = 0.0;
    Complex gain{0.0, 0.0};
};

struct ClusterSpec {
    double central_azimuth = 0.0;
    double central_elevation = kPi / 2.0;
    std::vector<ClusterComponent> components;
    /// M times the sum of |gain|^2 over components (after any amplification).
    double power = 0.0;
};

struct ExperimentConfig {
    std::size_t num_nodes = 15;
    std::size_t num_antennas = 100;
    std::size_t num_pilots = 12;
    std::size_t num_groups = 3;
    std::size_t num_clusters = 4;
    std::size_t components_per_cluster = 10;
    double central_angle_min_deg = 45.0;
    double central_angle_max_deg = 135.0;
    double component_angle_mean_deg = 7.5;
    double amplification_min = 2.0;
    double amplification_max = 6.0;
    double snr_db = 20.0;
    double carrier_frequency_hz = 2.47e9;
    ArrayGeometry array{};
    std::uint64_t rng_seed = 1;

    [[nodiscard]] double snr_linear() const noexcept { return std::pow(10.0, snr_db / 10.0); }

    void validate() const
    {
        if (num_nodes == 0 || num_antennas == 0 || num_pilots == 0 || num_groups == 0 || num_clusters == 0
            || components_per_cluster == 0) {
            throw ConfigError("all counts must be positive");
        }
        if (array.size() != num_antennas) {
            throw ConfigError("array " + std::to_string(array.rows) + "x" + std::to_string(array.cols)
                              + " does not have " + std::to_string(num_antennas) + " elements");
        }
        if (!(array.spacing > 0.0)) {
            throw ConfigError("element spacing must be positive");
        }
        if (!(central_angle_min_deg >= 0.0 && central_angle_max_deg <= 180.0
              && central_angle_min_deg <= central_angle_max_deg)) {
            throw ConfigError("central angle range must lie within [0, 180] degrees");
        }
        if (!(component_angle_mean_deg > 0.0)) {
            throw ConfigError("component angle mean must be positive");
        }
        if (!(amplification_min > 0.0 && amplification_min <= amplification_max)) {
            throw ConfigError("amplification range must be positive and ordered");
        }
        if (!std::isfinite(snr_db) || !(carrier_frequency_hz > 0.0)) {
            throw ConfigError("snr and carrier frequency must be finite and positive");
        }
    }
};

struct ChannelInstance {
    ExperimentConfig config;
    std::vector<NodeProfile> profiles;
    ComplexMatrix channel;
    std::vector<std::vector<ClusterSpec>> clusters;
    double snr_linear = 100.0;

    [[nodiscard]] std::size_t num_nodes() const noexcept { return profiles.size(); }
    [[nodiscard]] const ArrayGeometry& array() const noexcept { return config.array; }

    /// ||h_k||^2 for every node.
    [[nodiscard]] std::vector<double> row_powers() const
    {
        std::vector<double> p(channel.rows());
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] = squared_norm(channel.row(k));
        }
        return p;
    }
};

inline std::vector<Complex> steering_vector(double azimuth, double elevation, const ArrayGeometry& geometry)
{
    std::vector<Complex> a(geometry.size());
    const double step = kTwoPi * geometry.spacing;
    const double vertical = std::cos(elevation);
    const double horizontal = std::sin(elevation) * std::cos(azimuth);
    for (std::size_t r = 0; r < geometry.rows; ++r) {
        for (std::size_t c = 0; c < geometry.cols; ++c) {
            const double phase = step * (static_cast<double>(r) * vertical + static_cast<double>(c) * horizontal);
            a[r * geometry.cols + c] = std::polar(1.0, phase);
        }
    }
    return a;
}

inline std::vector<Complex> steering_vector(double azimuth, double elevation, const ArrayGeometry& geometry,
                                            std::size_t num_antennas)
{
    if (geometry.size() != num_antennas) {
        throw ConfigError("steering_vector: geometry has " + std::to_string(geometry.size())
                          + " elements, expected " + std::to_string(num_antennas));
    }
    return steering_vector(azimuth, elevation, geometry);
}

/// Spread of the cluster central angles as a fraction of the full circle.
inline double cluster_angular_spread(std::span<const ClusterSpec> clusters)
{
    if (clusters.empty()) {
        throw std::domain_error("cluster_angular_spread: no clusters");
    }
    auto [lo, hi] = std::minmax_element(clusters.begin(), clusters.end(),
                                        [](const ClusterSpec& a, const ClusterSpec& b) {
                                            return a.central_azimuth < b.central_azimuth;
                                        });
    return (hi->central_azimuth - lo->central_azimuth) / kTwoPi;
}

/// psi * (1 - P_dominant / sum of the other cluster powers), clamped below at 0.
inline double spread_from_powers(double psi, double dominant_power, double other_power)
{
    if (!(other_power > 0.0)) {
        return 0.0;
    }
    return std::clamp(psi * (1.0 - dominant_power / other_power), 0.0, 1.0);
}

/// Index of the highest-power cluster, lowest index on ties.
inline std::size_t dominant_cluster(std::span<const ClusterSpec> clusters)
{
    if (clusters.empty()) {
        throw std::domain_error("dominant_cluster: no clusters");
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < clusters.size(); ++c) {
        if (clusters[c].power > clusters[best].power) {
            best = c;
        }
    }
    return best;
}

/// Normalised angular spectrum spread sigma of one node from its clusters.
inline double angular_spread(std::span<const ClusterSpec> clusters)
{
    if (clusters.size() < 2) {
        throw std::domain_error("angular_spread: need a dominant cluster and at least one other");
    }
    const std::size_t dom = dominant_cluster(clusters);
    double others = 0.0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (c != dom) {
            others += clusters[c].power;
        }
    }
    return spread_from_powers(cluster_angular_spread(clusters), clusters[dom].power, others);
}

namespace detail {

struct NodeChannel {
    NodeProfile profile;
    std::vector<ClusterSpec> clusters;
    std::vector<Complex> row;
};

inline double signed_exponential(std::mt19937_64& rng, double mean)
{
    std::exponential_distribution<double> magnitude(1.0 / mean);
    std::bernoulli_distribution negative(0.5);
    const double m = magnitude(rng);
    return negative(rng) ? -m : m;
}

inline NodeChannel generate_node(const ExperimentConfig& cfg, NodeId id, std::mt19937_64& rng)
{
    const std::size_t m = cfg.num_antennas;
    const double spread_mean = deg_to_rad(cfg.component_angle_mean_deg);
    std::uniform_real_distribution<double> central(deg_to_rad(cfg.central_angle_min_deg),
                                                   deg_to_rad(cfg.central_angle_max_deg));
    std::normal_distribution<double> fading(0.0, std::sqrt(0.5)); // CN(0, 1): unit total variance

    NodeChannel out;
    out.clusters.resize(cfg.num_clusters);
    for (ClusterSpec& c : out.clusters) {
        c.central_azimuth = central(rng);
    }

    // Per-cluster array response, summed later so the dominant one can be rescaled.
    std::vector<std::vector<Complex>> contribution(cfg.num_clusters, std::vector<Complex>(m));
    for (std::size_t ci = 0; ci < cfg.num_clusters; ++ci) {
        ClusterSpec& c = out.clusters[ci];
        c.components.resize(cfg.components_per_cluster);
        double gain_energy = 0.0;
        for (ClusterComponent& comp : c.components) {
            comp.azimuth_offset = signed_exponential(rng, spread_mean);
            comp.elevation_offset = signed_exponential(rng, spread_mean);
            const double re = fading(rng);
            const double im = fading(rng);
            comp.gain = Complex{re, im};
            gain_energy += std::norm(comp.gain);
            const auto a = steering_vector(c.central_azimuth + comp.azimuth_offset,
                                           c.central_elevation + comp.elevation_offset, cfg.array);
            for (std::size_t i = 0; i < m; ++i) {
                contribution[ci][i] += comp.gain * a[i];
            }
        }
        c.power = static_cast<double>(m) * gain_energy;
    }

    const std::size_t dom = dominant_cluster(out.clusters);
    std::uniform_real_distribution<double> amplification(cfg.amplification_min, cfg.amplification_max);
    const double amp = amplification(rng);
    for (ClusterComponent& comp : out.clusters[dom].components) {
        comp.gain *= amp;
    }
    out.clusters[dom].power *= amp * amp;

    const double total_components = static_cast<double>(cfg.num_clusters * cfg.components_per_cluster);
    out.row.assign(m, Complex{0.0, 0.0});
    for (std::size_t ci = 0; ci < cfg.num_clusters; ++ci) {
        const double scale = (ci == dom ? amp : 1.0) / std::sqrt(total_components);
        for (std::size_t i = 0; i < m; ++i) {
            out.row[i] += scale * contribution[ci][i];
        }
    }
    const double energy = squared_norm(out.row);
    if (energy > 0.0) {
        const double renorm = std::sqrt(static_cast<double>(m) / energy);
        for (Complex& x : out.row) {
            x *= renorm;
        }
    }

    out.profile.id = id;
    out.profile.theta = out.clusters[dom].central_azimuth;
    out.profile.sigma = angular_spread(out.clusters);
    return out;
}

} // namespace detail

/**
 * Draws a full instance from `config`. The result depends only on the config
 * (including rng_seed); the same config always yields bit-identical output on
 * one platform.
 */
inline ChannelInstance generate_instance(const ExperimentConfig& config)
{
    config.validate();
    if (config.num_clusters < 2) {
        throw ConfigError("at least two clusters are needed to define an angular spread");
    }
    std::mt19937_64 rng(config.rng_seed);

    ChannelInstance inst;
    inst.config = config;
    inst.snr_linear = config.snr_linear();
    inst.channel = ComplexMatrix(config.num_nodes, config.num_antennas);
    inst.profiles.reserve(config.num_nodes);
    inst.clusters.reserve(config.num_nodes);
    for (std::size_t k = 0; k < config.num_nodes; ++k) {
        auto node = detail::generate_node(config, static_cast<NodeId>(k), rng);
        std::copy(node.row.begin(), node.row.end(), inst.channel.row(k).begin());
        inst.profiles.push_back(node.profile);
        inst.clusters.push_back(std::move(node.clusters));
    }
    return inst;
}

} // namespace mimo_grouping
