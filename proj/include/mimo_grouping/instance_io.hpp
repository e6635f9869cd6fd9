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
// Instance files are single JSON documents (format "mimo-grouping/instance",
// version 1). See docs/instance_format.md for the layout. Doubles are written
// in shortest round-trip form, so a load after a save is bit-exact.

#pragma once

#include "channel_model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mimo_grouping {

inline constexpr const char* kInstanceFormat = "mimo-grouping/instance";
inline constexpr int kInstanceFormatVersion = 1;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline nlohmann::json config_to_json(const ExperimentConfig& c)
{
    return {
        {"num_nodes", c.num_nodes},
        {"num_antennas", c.num_antennas},
        {"num_pilots", c.num_pilots},
        {"num_groups", c.num_groups},
        {"num_clusters", c.num_clusters},
        {"components_per_cluster", c.components_per_cluster},
        {"central_angle_min_deg", c.central_angle_min_deg},
        {"central_angle_max_deg", c.central_angle_max_deg},
        {"component_angle_mean_deg", c.component_angle_mean_deg},
        {"amplification_min", c.amplification_min},
        {"amplification_max", c.amplification_max},
        {"snr_db", c.snr_db},
        {"carrier_frequency_hz", c.carrier_frequency_hz},
        {"array_rows", c.array.rows},
        {"array_cols", c.array.cols},
        {"element_spacing", c.array.spacing},
        {"rng_seed", c.rng_seed},
    };
}

/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {})
{
    if (!j.is_object()) {
        throw FormatError("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "num_nodes") base.num_nodes = value.get<std::size_t>();
            else if (key == "num_antennas") base.num_antennas = value.get<std::size_t>();
            else if (key == "num_pilots") base.num_pilots = value.get<std::size_t>();
            else if (key == "num_groups") base.num_groups = value.get<std::size_t>();
            else if (key == "num_clusters") base.num_clusters = value.get<std::size_t>();
            else if (key == "components_per_cluster") base.components_per_cluster = value.get<std::size_t>();
            else if (key == "central_angle_min_deg") base.central_angle_min_deg = value.get<double>();
            else if (key == "central_angle_max_deg") base.central_angle_max_deg = value.get<double>();
            else if (key == "component_angle_mean_deg") base.component_angle_mean_deg = value.get<double>();
            else if (key == "amplification_min") base.amplification_min = value.get<double>();
            else if (key == "amplification_max") base.amplification_max = value.get<double>();
            else if (key == "snr_db") base.snr_db = value.get<double>();
            else if (key == "carrier_frequency_hz") base.carrier_frequency_hz = value.get<double>();
            else if (key == "array_rows") base.array.rows = value.get<std::size_t>();
            else if (key == "array_cols") base.array.cols = value.get<std::size_t>();
            else if (key == "element_spacing") base.array.spacing = value.get<double>();
            else if (key == "rng_seed") base.rng_seed = value.get<std::uint64_t>();
            else throw FormatError("unknown config key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("config key '" + key + "': " + e.what());
        }
    }
    return base;
}

inline nlohmann::json instance_to_json(const ChannelInstance& inst)
{
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& p : inst.profiles) {
        profiles.push_back({{"id", p.id}, {"theta", p.theta}, {"sigma", p.sigma}});
    }

    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& node : inst.clusters) {
        nlohmann::json per_node = nlohmann::json::array();
        for (const auto& c : node) {
            nlohmann::json comps = nlohmann::json::array();
            for (const auto& comp : c.components) {
                comps.push_back({comp.azimuth_offset, comp.elevation_offset, comp.gain.real(), comp.gain.imag()});
            }
            per_node.push_back({{"central_azimuth", c.central_azimuth},
                                {"central_elevation", c.central_elevation},
                                {"power", c.power},
                                {"components", std::move(comps)}});
        }
        clusters.push_back(std::move(per_node));
    }

    nlohmann::json channel = nlohmann::json::array();
    for (std::size_t k = 0; k < inst.channel.rows(); ++k) {
        nlohmann::json row = nlohmann::json::array();
        for (const Complex& x : inst.channel.row(k)) {
            row.push_back(x.real());
            row.push_back(x.imag());
        }
        channel.push_back(std::move(row));
    }

    return {
        {"format", kInstanceFormat},
        {"version", kInstanceFormatVersion},
        {"config", config_to_json(inst.config)},
        {"snr_linear", inst.snr_linear},
        {"num_nodes", inst.profiles.size()},
        {"num_antennas", inst.channel.cols()},
        {"profiles", std::move(profiles)},
        {"clusters", std::move(clusters)},
        {"channel", std::move(channel)},
    };
}

inline ChannelInstance instance_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != kInstanceFormat) {
            throw FormatError("not an instance document");
        }
        if (j.at("version").get<int>() != kInstanceFormatVersion) {
            throw FormatError("unsupported instance version " + j.at("version").dump());
        }
        ChannelInstance inst;
        inst.config = config_from_json(j.at("config"));
        inst.snr_linear = j.at("snr_linear").get<double>();
        const auto k = j.at("num_nodes").get<std::size_t>();
        const auto m = j.at("num_antennas").get<std::size_t>();

        for (const auto& p : j.at("profiles")) {
            NodeProfile n{p.at("id").get<NodeId>(), p.at("theta").get<double>(), p.at("sigma").get<double>()};
            n.validate();
            inst.profiles.push_back(n);
        }
        if (inst.profiles.size() != k) {
            throw FormatError("profile count does not match num_nodes");
        }

        for (const auto& node : j.at("clusters")) {
            std::vector<ClusterSpec> specs;
            for (const auto& c : node) {
                ClusterSpec s;
                s.central_azimuth = c.at("central_azimuth").get<double>();
                s.central_elevation = c.at("central_elevation").get<double>();
                s.power = c.at("power").get<double>();
                for (const auto& comp : c.at("components")) {
                    if (comp.size() != 4) {
                        throw FormatError("cluster component must have 4 entries");
                    }
                    s.components.push_back({comp[0].get<double>(), comp[1].get<double>(),
                                            Complex{comp[2].get<double>(), comp[3].get<double>()}});
                }
                specs.push_back(std::move(s));
            }
            inst.clusters.push_back(std::move(specs));
        }

        const auto& rows = j.at("channel");
        if (rows.size() != k) {
            throw FormatError("channel row count does not match num_nodes");
        }
        inst.channel = ComplexMatrix(k, m);
        for (std::size_t r = 0; r < k; ++r) {
            const auto& row = rows[r];
            if (row.size() != 2 * m) {
                throw FormatError("channel row " + std::to_string(r) + " has " + std::to_string(row.size())
                                  + " numbers, expected " + std::to_string(2 * m));
            }
            for (std::size_t c = 0; c < m; ++c) {
                inst.channel(r, c) = Complex{row[2 * c].get<double>(), row[2 * c + 1].get<double>()};
            }
        }
        validate_node_ids(inst.profiles);
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed instance: ") + e.what());
    } catch (const std::domain_error& e) {
        throw FormatError(std::string("invalid instance: ") + e.what());
    } catch (const ConsistencyError& e) {
        throw FormatError(std::string("invalid instance: ") + e.what());
    }
}

inline void save_instance(const ChannelInstance& inst, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << instance_to_json(inst).dump() << "\n";
    if (!out) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

inline ChannelInstance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return instance_from_json(j);
}

} // namespace mimo_grouping
