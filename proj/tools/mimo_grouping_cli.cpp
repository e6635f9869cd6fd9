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
// mimo-grouping command line front end.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error, 3 partial
// (some instances failed or timed out).

#include <mimo_grouping/mimo_grouping.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace mg = mimo_grouping;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flags > config file > defaults.
struct ConfigFlags {
    std::string config_file;
    std::optional<std::size_t> nodes;
    std::optional<std::size_t> groups;
    std::optional<std::size_t> pilots;
    std::optional<std::size_t> antennas;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* app)
    {
        app->add_option("--config", config_file, "JSON experiment configuration file")->check(CLI::ExistingFile);
        app->add_option("--nodes", nodes, "number of nodes K");
        app->add_option("--groups", groups, "number of groups G");
        app->add_option("--pilots", pilots, "pilots per coherence block P (group capacity)");
        app->add_option("--antennas", antennas, "base station antennas M (square array)");
        app->add_option("--seed", seed, "master RNG seed");
    }

    [[nodiscard]] mg::ExperimentConfig resolve() const
    {
        mg::ExperimentConfig cfg;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw UsageError(config_file + ": " + e.what());
            }
            try {
                cfg = mg::config_from_json(j, cfg);
            } catch (const mg::FormatError& e) {
                throw UsageError(config_file + ": " + e.what());
            }
        }
        if (nodes) cfg.num_nodes = *nodes;
        if (groups) cfg.num_groups = *groups;
        if (pilots) cfg.num_pilots = *pilots;
        if (seed) cfg.rng_seed = *seed;
        if (antennas) {
            const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(*antennas))));
            if (side * side != *antennas) {
                throw UsageError("--antennas must be a perfect square for the default square array");
            }
            cfg.num_antennas = *antennas;
            cfg.array.rows = side;
            cfg.array.cols = side;
        }
        try {
            cfg.validate();
        } catch (const mg::ConfigError& e) {
            throw UsageError(e.what());
        }
        if (cfg.num_groups * cfg.num_pilots < cfg.num_nodes) {
            throw UsageError(std::to_string(cfg.num_groups) + " groups of " + std::to_string(cfg.num_pilots)
                             + " pilots cannot hold " + std::to_string(cfg.num_nodes) + " nodes");
        }
        return cfg;
    }
};

std::vector<mg::Method> parse_methods(const std::vector<std::string>& names)
{
    std::vector<mg::Method> out;
    for (const auto& n : names) {
        const auto m = mg::parse_method(n);
        if (!m) {
            throw UsageError("unknown method '" + n + "'");
        }
        if (std::find(out.begin(), out.end(), *m) == out.end()) {
            out.push_back(*m);
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << content;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mimo-grouping: directional node grouping for massive MIMO"};
    app.set_version_flag("--version", std::string(mg::kToolVersion));
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate channel instances");
    ConfigFlags gen_cfg;
    gen_cfg.attach(gen);
    std::size_t gen_count = 20;
    std::string gen_out;
    gen->add_option("--instances", gen_count, "number of instances")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "run partitioners and SINR evaluation on instance files");
    std::string eval_in;
    std::string eval_out = "results.csv";
    std::vector<std::string> eval_methods{"exact", "approximation", "clumped", "power"};
    std::optional<std::size_t> eval_groups;
    std::optional<std::size_t> eval_pilots;
    double eval_timeout = 60.0;
    std::size_t eval_workers = 1;
    eval->add_option("--in", eval_in, "directory of instance files")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--out", eval_out, "results CSV path")->capture_default_str();
    eval->add_option("--methods", eval_methods, "exact, approximation, clumped, power, brute_force")
        ->delimiter(',')
        ->capture_default_str();
    eval->add_option("--groups", eval_groups, "override number of groups");
    eval->add_option("--pilots", eval_pilots, "override group capacity");
    eval->add_option("--timeout", eval_timeout, "exact solver budget per instance in seconds (0 = none)")
        ->capture_default_str();
    eval->add_option("--workers", eval_workers, "instances evaluated concurrently")->capture_default_str();

    // summarize
    auto* summ = app.add_subcommand("summarize", "aggregate a results CSV");
    std::string summ_in;
    std::string summ_out = ".";
    summ->add_option("--in", summ_in, "results CSV")->required()->check(CLI::ExistingFile);
    summ->add_option("--out", summ_out, "output directory for summary.csv and long.csv")->capture_default_str();

    // export-lp
    auto* lp = app.add_subcommand("export-lp", "write the grouping MILP in LP format");
    std::string lp_in;
    std::string lp_out;
    bool lp_verbatim = false;
    ConfigFlags lp_cfg;
    lp_cfg.attach(lp);
    lp->add_option("--in", lp_in, "instance file (otherwise one is generated from the config flags)")
        ->check(CLI::ExistingFile);
    lp->add_option("--out", lp_out, "LP file path")->required();
    lp->add_flag("--verbatim", lp_verbatim, "emit the back-filled variant without empty-position releases (see docs/lp_model.md)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            const auto cfg = gen_cfg.resolve();
            const auto report = mg::run_generate(cfg, cfg.rng_seed, gen_count, gen_out);
            std::cout << "wrote " << report.files.size() << " instances and " << report.manifest_path << "\n";
            return kExitOk;
        }

        if (eval->parsed()) {
            mg::EvaluateOptions opt;
            opt.methods = parse_methods(eval_methods);
            opt.groups = eval_groups;
            opt.capacity = eval_pilots;
            opt.timeout_seconds = eval_timeout > 0.0 ? std::optional<double>(eval_timeout) : std::nullopt;
            opt.workers = std::max<std::size_t>(1, eval_workers);
            const auto rows = mg::run_evaluate(eval_in, opt);
            std::ostringstream os;
            mg::write_results(os, rows);
            write_file(eval_out, os.str());

            std::size_t failed = 0;
            for (const auto& r : rows) {
                if (r.status != mg::RowStatus::ok) {
                    ++failed;
                    std::cerr << r.instance << " [" << r.method << "]: " << mg::to_string(r.status) << " "
                              << r.message << "\n";
                }
            }
            std::cout << "wrote " << rows.size() << " rows to " << eval_out << "\n";
            return failed == 0 ? kExitOk : kExitPartial;
        }

        if (summ->parsed()) {
            std::ifstream in(summ_in, std::ios::binary);
            std::stringstream buf;
            buf << in.rdbuf();
            const auto rows = mg::read_results(buf.str());
            const auto summary = mg::summarize(rows);
            std::ostringstream s, l;
            mg::write_summary(s, summary);
            mg::write_long(l, rows);
            const std::filesystem::path dir(summ_out);
            write_file(dir / "summary.csv", s.str());
            write_file(dir / "long.csv", l.str());
            std::cout << "wrote " << summary.size() << " summary rows to " << (dir / "summary.csv").string() << "\n";
            return kExitOk;
        }

        if (lp->parsed()) {
            mg::ChannelInstance inst;
            if (!lp_in.empty()) {
                inst = mg::load_instance(lp_in);
            } else {
                inst = mg::generate_instance(lp_cfg.resolve());
            }
            const std::size_t groups = lp_cfg.groups.value_or(inst.config.num_groups);
            const std::size_t pilots = lp_cfg.pilots.value_or(inst.config.num_pilots);
            mg::export_lp(inst.profiles, groups, pilots, lp_out,
                          lp_verbatim ? mg::LpVariant::verbatim : mg::LpVariant::repaired);
            std::cout << "wrote " << lp_out << "\n";
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mg::csv::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
