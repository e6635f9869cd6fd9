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
// Mixed-integer model of the max-min angular grouping problem, written as a
// CPLEX-style LP file for external solvers.
//
// Variable names (k = node id, g = 1..G, p = 1..P):
//   u_k_g    binary   node k is in group g
//   Y_k_g_p  binary   node k is the p-th node of group g
//   m_g_p    binary   position p is the last occupied position of group g
//   t_g_p    free     angle at position p
//   s_g_p    free     angular shift at position p
//   v_g_p    free     t_g_p * m_g_p
//   z_g_p    free     s_g_p * m_g_p
//   T_g      free     angle of the last node
//   S_g      free     shift of the last node
//   d_g_p    >= 0     angular difference after position p (d_g_P closes the circle)
//   B        >= 0     objective
//
// The repaired variant fills positions from 1 upwards, cancels the ordering
// rows on the later position, and cancels the difference and min rows when
// the successor position is empty. The verbatim variant fills positions from
// the back, releases the ordering and min rows on the earlier position and
// has no release on the difference rows; its wrap row then reads an empty
// first slot for partial groups. See docs/lp_model.md.

#pragma once

#include "geometry.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimo_grouping {

enum class LpVariant { repaired, verbatim };

enum class Sense { less_equal, greater_equal, equal };

struct LinearTerm {
    double coef = 0.0;
    std::string var;
};

struct LinearRow {
    std::string name;
    std::vector<LinearTerm> terms;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
};

enum class VarKind { binary, free_continuous, nonnegative };

struct MilpVariable {
    std::string name;
    VarKind kind = VarKind::nonnegative;
};

struct MilpModel {
    std::vector<MilpVariable> variables;
    std::vector<LinearRow> rows;
    std::string objective = "B"; ///< maximised

    [[nodiscard]] std::size_t count(VarKind kind) const
    {
        std::size_t n = 0;
        for (const auto& v : variables) {
            n += v.kind == kind ? 1 : 0;
        }
        return n;
    }

    /// Number of rows whose name starts with `family` followed by '_' or end.
    [[nodiscard]] std::size_t count_rows(const std::string& family) const
    {
        std::size_t n = 0;
        for (const auto& r : rows) {
            if (r.name.compare(0, family.size(), family) == 0
                && (r.name.size() == family.size() || r.name[family.size()] == '_')) {
                ++n;
            }
        }
        return n;
    }
};

namespace lp_names {

inline std::string u(NodeId k, std::size_t g) { return "u_" + std::to_string(k) + "_" + std::to_string(g); }
inline std::string Y(NodeId k, std::size_t g, std::size_t p)
{
    return "Y_" + std::to_string(k) + "_" + std::to_string(g) + "_" + std::to_string(p);
}
inline std::string gp(const char* base, std::size_t g, std::size_t p)
{
    return std::string(base) + "_" + std::to_string(g) + "_" + std::to_string(p);
}
inline std::string g1(const char* base, std::size_t g) { return std::string(base) + "_" + std::to_string(g); }

} // namespace lp_names

namespace detail {

class RowBuilder {
public:
    explicit RowBuilder(std::string name) { row_.name = std::move(name); }

    RowBuilder& add(double coef, const std::string& var)
    {
        for (auto& t : row_.terms) {
            if (t.var == var) {
                t.coef += coef;
                return *this;
            }
        }
        row_.terms.push_back({coef, var});
        return *this;
    }

    /// Adds coef * (number of nodes at position p of group g).
    RowBuilder& add_occupancy(double coef, std::span<const NodeProfile> nodes, std::size_t g, std::size_t p)
    {
        for (const auto& n : nodes) {
            add(coef, lp_names::Y(n.id, g, p));
        }
        return *this;
    }

    LinearRow finish(Sense sense, double rhs)
    {
        row_.sense = sense;
        row_.rhs = rhs;
        return std::move(row_);
    }

private:
    LinearRow row_;
};

} // namespace detail

/**
 * Builds the grouping MILP for `nodes`. Angles and shifts are in radians; the
 * big-M constants are 2pi on angle rows and pi on shift and min rows.
 */
inline MilpModel build_milp(std::span<const NodeProfile> nodes, std::size_t groups, std::size_t capacity,
                            LpVariant variant = LpVariant::repaired)
{
    using namespace lp_names;
    using detail::RowBuilder;

    if (groups == 0 || capacity == 0 || groups * capacity < nodes.size()) {
        throw CapacityError("build_milp: " + std::to_string(groups) + " x " + std::to_string(capacity)
                            + " cannot hold " + std::to_string(nodes.size()) + " nodes");
    }
    for (const auto& n : nodes) {
        n.validate();
    }

    const bool repaired = variant == LpVariant::repaired;
    const std::size_t G = groups;
    const std::size_t P = capacity;
    MilpModel model;
    auto& rows = model.rows;

    for (const auto& n : nodes) {
        for (std::size_t g = 1; g <= G; ++g) {
            model.variables.push_back({u(n.id, g), VarKind::binary});
        }
    }
    for (const auto& n : nodes) {
        for (std::size_t g = 1; g <= G; ++g) {
            for (std::size_t p = 1; p <= P; ++p) {
                model.variables.push_back({Y(n.id, g, p), VarKind::binary});
            }
        }
    }
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            model.variables.push_back({gp("m", g, p), VarKind::binary});
        }
    }
    for (const char* base : {"t", "s", "v", "z"}) {
        for (std::size_t g = 1; g <= G; ++g) {
            for (std::size_t p = 1; p <= P; ++p) {
                model.variables.push_back({gp(base, g, p), VarKind::free_continuous});
            }
        }
    }
    for (std::size_t g = 1; g <= G; ++g) {
        model.variables.push_back({g1("T", g), VarKind::free_continuous});
        model.variables.push_back({g1("S", g), VarKind::free_continuous});
    }
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            model.variables.push_back({gp("d", g, p), VarKind::nonnegative});
        }
    }
    model.variables.push_back({"B", VarKind::nonnegative});

    // Each node in exactly one group.
    for (const auto& n : nodes) {
        RowBuilder r(g1("one_group", n.id));
        for (std::size_t g = 1; g <= G; ++g) {
            r.add(1.0, u(n.id, g));
        }
        rows.push_back(r.finish(Sense::equal, 1.0));
    }
    // Pilot capacity.
    for (std::size_t g = 1; g <= G; ++g) {
        RowBuilder r(g1("capacity", g));
        for (const auto& n : nodes) {
            r.add(1.0, u(n.id, g));
        }
        rows.push_back(r.finish(Sense::less_equal, static_cast<double>(P)));
    }
    // A node holds one position in its own group and none elsewhere.
    for (const auto& n : nodes) {
        for (std::size_t g = 1; g <= G; ++g) {
            RowBuilder r("link_" + std::to_string(n.id) + "_" + std::to_string(g));
            for (std::size_t p = 1; p <= P; ++p) {
                r.add(1.0, Y(n.id, g, p));
            }
            r.add(-1.0, u(n.id, g));
            rows.push_back(r.finish(Sense::equal, 0.0));
        }
    }
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            RowBuilder r(gp("one_node", g, p));
            r.add_occupancy(1.0, nodes, g, p);
            rows.push_back(r.finish(Sense::less_equal, 1.0));
        }
    }
    // No gaps. Repaired: occupancy(p+1) <= occupancy(p). Verbatim: occupancy(p) <= occupancy(p+1).
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p < P; ++p) {
            RowBuilder r(gp("no_gaps", g, p));
            const double sign = repaired ? -1.0 : 1.0;
            r.add_occupancy(sign, nodes, g, p);
            r.add_occupancy(-sign, nodes, g, p + 1);
            rows.push_back(r.finish(Sense::less_equal, 0.0));
        }
    }
    // t = sum theta Y.
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            RowBuilder r(gp("select_angle", g, p));
            r.add(1.0, gp("t", g, p));
            for (const auto& n : nodes) {
                r.add(-n.theta, Y(n.id, g, p));
            }
            rows.push_back(r.finish(Sense::equal, 0.0));
        }
    }
    // Angle ordering, cancelled by 2pi on an empty position.
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            for (std::size_t q = p + 1; q <= P; ++q) {
                RowBuilder r("order_" + std::to_string(g) + "_" + std::to_string(p) + "_" + std::to_string(q));
                r.add(1.0, gp("t", g, p)).add(-1.0, gp("t", g, q));
                r.add_occupancy(kTwoPi, nodes, g, repaired ? q : p);
                rows.push_back(r.finish(Sense::less_equal, kTwoPi));
            }
        }
    }
    // s <= pi sum sigma Y.
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            RowBuilder r(gp("shift", g, p));
            r.add(1.0, gp("s", g, p));
            for (const auto& n : nodes) {
                r.add(-kPi * n.sigma, Y(n.id, g, p));
            }
            rows.push_back(r.finish(Sense::less_equal, 0.0));
        }
    }
    // Last node angle and shift.
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            RowBuilder r(gp("last_angle", g, p));
            r.add(1.0, g1("T", g)).add(-1.0, gp("t", g, p));
            rows.push_back(r.finish(Sense::greater_equal, 0.0));
        }
        RowBuilder tr(g1("last_angle_sel", g));
        tr.add(1.0, g1("T", g));
        RowBuilder sr(g1("last_shift", g));
        sr.add(1.0, g1("S", g));
        RowBuilder mr(g1("select_last", g));
        for (std::size_t p = 1; p <= P; ++p) {
            tr.add(-1.0, gp("v", g, p));
            sr.add(-1.0, gp("z", g, p));
            mr.add(1.0, gp("m", g, p));
        }
        rows.push_back(tr.finish(Sense::less_equal, 0.0));
        rows.push_back(sr.finish(Sense::equal, 0.0));
        rows.push_back(mr.finish(Sense::equal, 1.0));
    }
    // Linearisation of v = t m and z = s m.
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            const auto t = gp("t", g, p), s = gp("s", g, p), m = gp("m", g, p);
            const auto v = gp("v", g, p), z = gp("z", g, p);
            rows.push_back(RowBuilder(gp("aux_v_le_t", g, p)).add(1.0, v).add(-1.0, t).finish(Sense::less_equal, 0.0));
            rows.push_back(
                RowBuilder(gp("aux_v_le_m", g, p)).add(1.0, v).add(-kTwoPi, m).finish(Sense::less_equal, 0.0));
            rows.push_back(RowBuilder(gp("aux_v_ge", g, p))
                               .add(1.0, v)
                               .add(-1.0, t)
                               .add(-kTwoPi, m)
                               .finish(Sense::greater_equal, -kTwoPi));
            rows.push_back(RowBuilder(gp("aux_z_le_s", g, p)).add(1.0, z).add(-1.0, s).finish(Sense::less_equal, 0.0));
            rows.push_back(
                RowBuilder(gp("aux_z_le_m", g, p)).add(1.0, z).add(-kPi, m).finish(Sense::less_equal, 0.0));
            rows.push_back(RowBuilder(gp("aux_z_ge", g, p))
                               .add(1.0, z)
                               .add(-1.0, s)
                               .add(-kPi, m)
                               .finish(Sense::greater_equal, -kPi));
        }
    }
    // Consecutive differences: d_p <= t_{p+1} - t_p + s_{p+1} + s_p [+ 2pi (1 - occ_{p+1})].
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p < P; ++p) {
            RowBuilder r(gp("diff", g, p));
            r.add(1.0, gp("d", g, p))
                .add(-1.0, gp("t", g, p + 1))
                .add(1.0, gp("t", g, p))
                .add(-1.0, gp("s", g, p + 1))
                .add(-1.0, gp("s", g, p));
            double rhs = 0.0;
            if (repaired) {
                r.add_occupancy(kTwoPi, nodes, g, p + 1);
                rhs = kTwoPi;
            }
            rows.push_back(r.finish(Sense::less_equal, rhs));
        }
        // d_P <= t_1 + 2pi - T + s_1 + S.
        RowBuilder w(g1("diff_wrap", g));
        w.add(1.0, gp("d", g, P))
            .add(-1.0, gp("t", g, 1))
            .add(1.0, g1("T", g))
            .add(-1.0, gp("s", g, 1))
            .add(-1.0, g1("S", g));
        rows.push_back(w.finish(Sense::less_equal, kTwoPi));
    }
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p <= P; ++p) {
            rows.push_back(RowBuilder(gp("diff_cap", g, p)).add(1.0, gp("d", g, p)).finish(Sense::less_equal, kPi));
        }
    }
    // B <= d_p + pi (1 - occupancy), cancelled on the successor (repaired) or on p itself (verbatim).
    for (std::size_t g = 1; g <= G; ++g) {
        for (std::size_t p = 1; p < P; ++p) {
            RowBuilder r(gp("min", g, p));
            r.add(1.0, "B").add(-1.0, gp("d", g, p));
            r.add_occupancy(kPi, nodes, g, repaired ? p + 1 : p);
            rows.push_back(r.finish(Sense::less_equal, kPi));
        }
        rows.push_back(
            RowBuilder(g1("min_wrap", g)).add(1.0, "B").add(-1.0, gp("d", g, P)).finish(Sense::less_equal, 0.0));
    }
    return model;
}

namespace detail {

inline std::string format_number(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format coefficient");
    }
    return std::string(buf, end);
}

} // namespace detail

/// Writes the model in CPLEX LP syntax. Coefficients use shortest round-trip decimal form.
inline void write_lp(std::ostream& out, const MilpModel& model, const std::string& title = {})
{
    constexpr std::size_t kTermsPerLine = 6;
    if (!title.empty()) {
        out << "\\ " << title << "\n";
    }
    out << "Maximize\n obj: " << model.objective << "\nSubject To\n";
    for (const LinearRow& row : model.rows) {
        out << " " << row.name << ":";
        std::size_t written = 0;
        for (const LinearTerm& t : row.terms) {
            if (t.coef == 0.0) {
                continue;
            }
            if (written > 0 && written % kTermsPerLine == 0) {
                out << "\n   ";
            }
            out << (t.coef < 0.0 ? " - " : " + ") << detail::format_number(std::fabs(t.coef)) << " " << t.var;
            ++written;
        }
        if (written == 0) {
            // Keep the row syntactically valid: an explicit zero on a named variable.
            out << " 0 " << (row.terms.empty() ? model.objective : row.terms.front().var);
        }
        switch (row.sense) {
        case Sense::less_equal: out << " <= "; break;
        case Sense::greater_equal: out << " >= "; break;
        case Sense::equal: out << " = "; break;
        }
        out << detail::format_number(row.rhs) << "\n";
    }
    out << "Bounds\n";
    for (const auto& v : model.variables) {
        if (v.kind == VarKind::free_continuous) {
            out << " " << v.name << " free\n";
        }
    }
    out << "Binary\n";
    for (const auto& v : model.variables) {
        if (v.kind == VarKind::binary) {
            out << " " << v.name << "\n";
        }
    }
    out << "End\n";
}

inline std::string to_lp_string(const MilpModel& model, const std::string& title = {})
{
    std::ostringstream os;
    write_lp(os, model, title);
    return os.str();
}

/// Builds and writes the model for `nodes` to `path`. Throws std::runtime_error on I/O failure.
inline void export_lp(std::span<const NodeProfile> nodes, std::size_t groups, std::size_t capacity,
                      const std::string& path, LpVariant variant = LpVariant::repaired)
{
    const MilpModel model = build_milp(nodes, groups, capacity, variant);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_lp(out, model,
             "max-min angular grouping, K=" + std::to_string(nodes.size()) + " G=" + std::to_string(groups)
                 + " P=" + std::to_string(capacity)
                 + (variant == LpVariant::repaired ? " (repaired)" : " (verbatim)"));
    if (!out) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

} // namespace mimo_grouping
