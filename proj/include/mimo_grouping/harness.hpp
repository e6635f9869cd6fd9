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
// Experiment pipeline behind the command line tool:
//   generate  -> instance files + manifest.json
//   evaluate  -> results.csv, one row per (instance, method)
//   summarize -> summary.csv (mean and 95% t-interval) + long.csv

#pragma once

#include "channel_model.hpp"
#include "csv.hpp"
#include "instance_io.hpp"
#include "partitioners.hpp"
#include "sinr.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace mimo_grouping {

inline constexpr const char* kToolVersion = "1.0.0";

/// splitmix64 of master + index; per-instance seeds for a sweep.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::string instance_file_name(std::size_t index)
{
    std::string digits = std::to_string(index);
    if (digits.size() < 4) {
        digits.insert(0, 4 - digits.size(), '0');
    }
    return "instance_" + digits + ".json";
}

struct GenerateReport {
    std::vector<std::string> files;
    std::vector<std::uint64_t> seeds;
    std::string manifest_path;
};

/// Writes `count` instances plus manifest.json into `out_dir` (created if missing).
inline GenerateReport run_generate(const ExperimentConfig& config, std::uint64_t master_seed, std::size_t count,
                                   const std::filesystem::path& out_dir)
{
    config.validate();
    std::filesystem::create_directories(out_dir);

    GenerateReport report;
    nlohmann::json listing = nlohmann::json::array();
    for (std::size_t i = 0; i < count; ++i) {
        ExperimentConfig c = config;
        c.rng_seed = derive_seed(master_seed, i);
        const auto path = out_dir / instance_file_name(i);
        save_instance(generate_instance(c), path.string());
        report.files.push_back(path.string());
        report.seeds.push_back(c.rng_seed);
        listing.push_back({{"file", path.filename().string()}, {"seed", c.rng_seed}});
    }

    nlohmann::json manifest = {
        {"tool_version", kToolVersion},
        {"command", "generate"},
        {"master_seed", master_seed},
        {"count", count},
        {"config", config_to_json(config)},
        {"instances", std::move(listing)},
    };
    report.manifest_path = (out_dir / "manifest.json").string();
    std::ofstream out(report.manifest_path);
    if (!out) {
        throw std::runtime_error("cannot write " + report.manifest_path);
    }
    out << manifest.dump(2) << "\n";
    return report;
}

enum class RowStatus { ok, timeout, error };

inline std::string_view to_string(RowStatus s) noexcept
{
    switch (s) {
    case RowStatus::ok: return "ok";
    case RowStatus::timeout: return "timeout";
    case RowStatus::error: return "error";
    }
    return "error";
}

inline const std::vector<std::string>& results_header()
{
    static const std::vector<std::string> header = {
        "instance", "nodes", "seed", "method", "status", "objective_B",
        "min_sinr_db", "mean_sinr_db", "max_sinr_db", "solve_time_s", "message"};
    return header;
}

/// One row of results.csv (schema version 1, see results_header()).
struct ResultRow {
    std::string instance;
    std::size_t nodes = 0;
    std::uint64_t seed = 0;
    std::string method;
    RowStatus status = RowStatus::ok;
    double objective_B = std::nan("");
    double min_sinr_db = std::nan("");
    double mean_sinr_db = std::nan("");
    double max_sinr_db = std::nan("");
    double solve_time_s = std::nan("");
    std::string message;
};

struct EvaluateOptions {
    std::vector<Method> methods{Method::exact, Method::approximation, Method::clumped, Method::power};
    std::optional<std::size_t> groups;   ///< defaults to the instance's config
    std::optional<std::size_t> capacity; ///< defaults to the instance's config
    std::optional<double> timeout_seconds = 60.0;
    std::size_t workers = 1;
};

inline PartitionResult run_method(Method m, const ChannelInstance& inst, std::size_t groups, std::size_t capacity,
                                  std::optional<double> timeout)
{
    switch (m) {
    case Method::exact: return exact_partition(inst.profiles, groups, capacity, ExactOptions{timeout});
    case Method::approximation: return approximate_partition(inst.profiles, groups, capacity);
    case Method::clumped: return clumped_partition(inst.profiles, groups, capacity);
    case Method::power: return power_partition(inst, groups, capacity);
    case Method::brute_force: return brute_force_partition(inst.profiles, groups, capacity);
    }
    throw std::logic_error("unknown method");
}

/// Every method on one instance; never throws, failures become error rows.
inline std::vector<ResultRow> evaluate_instance(const std::string& name, const ChannelInstance* inst,
                                                const std::string& load_error, const EvaluateOptions& opt)
{
    std::vector<ResultRow> rows;
    for (Method m : opt.methods) {
        ResultRow row;
        row.instance = name;
        row.method = std::string(to_string(m));
        if (inst == nullptr) {
            row.status = RowStatus::error;
            row.message = load_error;
            rows.push_back(std::move(row));
            continue;
        }
        row.nodes = inst->num_nodes();
        row.seed = inst->config.rng_seed;
        try {
            const std::size_t g = opt.groups.value_or(inst->config.num_groups);
            const std::size_t p = opt.capacity.value_or(inst->config.num_pilots);
            const PartitionResult r = run_method(m, *inst, g, p, opt.timeout_seconds);
            row.solve_time_s = r.solve_time;
            if (!r.proven_optimal) {
                row.status = RowStatus::timeout;
                row.message = "time limit reached";
            } else {
                row.objective_B = r.objective_B;
                const SinrReport s = mrc_sinr(*inst, r.partition);
                row.min_sinr_db = s.min_db;
                row.mean_sinr_db = s.mean_db;
                row.max_sinr_db = s.max_db;
            }
        } catch (const std::exception& e) {
            row.status = RowStatus::error;
            row.message = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// instance_*.json files in `dir`, sorted by name.
inline std::vector<std::filesystem::path> list_instance_files(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error(dir.string() + " is not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("instance_", 0) == 0 && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

/**
 * Evaluates every instance file in `dir` with `opt.workers` threads. Rows
 * come back in (file name, method order) regardless of completion order.
 */
inline std::vector<ResultRow> run_evaluate(const std::filesystem::path& dir, const EvaluateOptions& opt)
{
    const auto files = list_instance_files(dir);
    std::vector<std::vector<ResultRow>> slots(files.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            const std::string name = files[i].filename().string();
            try {
                const ChannelInstance inst = load_instance(files[i].string());
                slots[i] = evaluate_instance(name, &inst, {}, opt);
            } catch (const std::exception& e) {
                slots[i] = evaluate_instance(name, nullptr, e.what(), opt);
            }
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, std::min(opt.workers, files.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) {
        pool.emplace_back(work);
    }
    work();
    for (auto& th : pool) {
        th.join();
    }

    std::vector<ResultRow> rows;
    for (auto& s : slots) {
        std::move(s.begin(), s.end(), std::back_inserter(rows));
    }
    return rows;
}

inline void write_results(std::ostream& out, const std::vector<ResultRow>& rows)
{
    csv::write_row(out, results_header());
    for (const auto& r : rows) {
        csv::write_row(out, {r.instance, std::to_string(r.nodes), std::to_string(r.seed), r.method,
                             std::string(to_string(r.status)), csv::number(r.objective_B),
                             csv::number(r.min_sinr_db), csv::number(r.mean_sinr_db), csv::number(r.max_sinr_db),
                             csv::number(r.solve_time_s), r.message});
    }
}

inline std::vector<ResultRow> read_results(std::string_view text)
{
    const auto records = csv::parse(text);
    if (records.empty()) {
        throw csv::ParseError(1, "empty results file");
    }
    if (records.front().fields != results_header()) {
        throw csv::ParseError(records.front().line, "unexpected header; not a version 1 results file");
    }
    std::vector<ResultRow> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& rec = records[i];
        const auto& f = rec.fields;
        if (f.size() != results_header().size()) {
            throw csv::ParseError(rec.line, "expected " + std::to_string(results_header().size()) + " fields, got "
                                                + std::to_string(f.size()));
        }
        ResultRow r;
        r.instance = f[0];
        r.nodes = csv::to_uint(f[1], rec.line, "nodes");
        r.seed = csv::to_uint(f[2], rec.line, "seed");
        r.method = f[3];
        if (f[4] == "ok") r.status = RowStatus::ok;
        else if (f[4] == "timeout") r.status = RowStatus::timeout;
        else if (f[4] == "error") r.status = RowStatus::error;
        else throw csv::ParseError(rec.line, "unknown status '" + f[4] + "'");
        r.objective_B = csv::to_double(f[5], rec.line, "objective_B");
        r.min_sinr_db = csv::to_double(f[6], rec.line, "min_sinr_db");
        r.mean_sinr_db = csv::to_double(f[7], rec.line, "mean_sinr_db");
        r.max_sinr_db = csv::to_double(f[8], rec.line, "max_sinr_db");
        r.solve_time_s = csv::to_double(f[9], rec.line, "solve_time_s");
        r.message = f[10];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline const std::vector<std::string>& summary_metrics()
{
    static const std::vector<std::string> m = {"min_sinr_db", "mean_sinr_db", "max_sinr_db", "objective_B",
                                               "solve_time_s"};
    return m;
}

inline double metric_value(const ResultRow& r, const std::string& metric)
{
    if (metric == "min_sinr_db") return r.min_sinr_db;
    if (metric == "mean_sinr_db") return r.mean_sinr_db;
    if (metric == "max_sinr_db") return r.max_sinr_db;
    if (metric == "objective_B") return r.objective_B;
    if (metric == "solve_time_s") return r.solve_time_s;
    throw std::invalid_argument("unknown metric " + metric);
}

struct SummaryRow {
    std::size_t nodes = 0;
    std::string method;
    std::string metric;
    ConfidenceInterval ci;
};

/// Mean and 95% t-interval per (node count, method, metric) over rows with status ok.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows)
{
    // Methods keep first-seen order within each node count.
    std::vector<std::pair<std::size_t, std::string>> keys;
    std::map<std::pair<std::size_t, std::string>, std::vector<const ResultRow*>> bucket;
    for (const auto& r : rows) {
        if (r.status != RowStatus::ok) {
            continue;
        }
        auto key = std::make_pair(r.nodes, r.method);
        if (!bucket.contains(key)) {
            keys.push_back(key);
        }
        bucket[key].push_back(&r);
    }
    std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<SummaryRow> out;
    for (const auto& key : keys) {
        for (const auto& metric : summary_metrics()) {
            std::vector<double> xs;
            for (const ResultRow* r : bucket[key]) {
                xs.push_back(metric_value(*r, metric));
            }
            out.push_back(SummaryRow{key.first, key.second, metric, t_interval(xs)});
        }
    }
    return out;
}

inline void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows)
{
    csv::write_row(out, {"nodes", "method", "metric", "n", "mean", "stddev", "ci_low", "ci_high", "half_width",
                         "ci_defined"});
    for (const auto& r : rows) {
        csv::write_row(out, {std::to_string(r.nodes), r.method, r.metric, std::to_string(r.ci.n),
                             csv::number(r.ci.mean), csv::number(r.ci.stddev), csv::number(r.ci.lower()),
                             csv::number(r.ci.upper()), csv::number(r.ci.half_width),
                             r.ci.defined ? "true" : "false"});
    }
}

/// One line per (instance, method, metric) for plotting tools.
inline void write_long(std::ostream& out, const std::vector<ResultRow>& rows)
{
    csv::write_row(out, {"instance", "nodes", "seed", "method", "metric", "value"});
    for (const auto& r : rows) {
        if (r.status != RowStatus::ok) {
            continue;
        }
        for (const auto& metric : summary_metrics()) {
            csv::write_row(out, {r.instance, std::to_string(r.nodes), std::to_string(r.seed), r.method, metric,
                                 csv::number(metric_value(r, metric))});
        }
    }
}

} // namespace mimo_grouping
