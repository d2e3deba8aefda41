#include "hsa/dot.hpp"

#include <sstream>

namespace hsa {

namespace {

/// DOT string literal: double quotes and backslashes escaped.
std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

const char* kOverFill = "#f4cccc";
const char* kUnderFill = "#cfe2f3";
const char* kWellFill = "#d9ead3";

} // namespace

std::string to_dot(const BipartiteGraph& g, const Matching* m, const DmPartition* part) {
    std::ostringstream out;
    out << "graph incidence {\n";
    out << "  rankdir=LR;\n";
    out << "  node [fontname=\"Helvetica\"];\n";

    auto fill_for_var = [&](const VarRef& v) -> const char* {
        if (!part) return nullptr;
        if (part->over_vars.count(v)) return kOverFill;
        if (part->under_vars.count(v)) return kUnderFill;
        if (part->well_vars.count(v)) return kWellFill;
        return nullptr;
    };
    auto fill_for_eq = [&](const std::string& id) -> const char* {
        if (!part) return nullptr;
        if (part->over_eqs.count(id)) return kOverFill;
        if (part->under_eqs.count(id)) return kUnderFill;
        if (part->well_eqs.count(id)) return kWellFill;
        return nullptr;
    };

    for (int v = 0; v < g.n_vars(); ++v) {
        out << "  v" << v << " [shape=ellipse, label=" << quoted(g.var_nodes[v].display());
        if (const char* fill = fill_for_var(g.var_nodes[v]))
            out << ", style=filled, fillcolor=\"" << fill << "\"";
        out << "];\n";
    }
    for (int e = 0; e < g.n_eqs(); ++e) {
        out << "  e" << e << " [shape=box, label=" << quoted(g.eq_ids[e]);
        if (const char* fill = fill_for_eq(g.eq_ids[e]))
            out << ", style=filled, fillcolor=\"" << fill << "\"";
        out << "];\n";
    }

    for (int v = 0; v < g.n_vars(); ++v) {
        for (int e : g.var_adj[v]) {
            out << "  v" << v << " -- e" << e;
            if (m && m->var_to_eq[v] == e) out << " [penwidth=2.5]";
            out << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string diff_log_table(const std::map<std::string, int>& diff_log) {
    std::ostringstream out;
    for (const auto& [id, count] : diff_log)
        if (count > 0) out << id << '\t' << count << '\n';
    return out.str();
}

} // namespace hsa
