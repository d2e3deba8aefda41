// Command-line front end: analyze | diff | gen | bench.
//
// Exit codes are a stable contract:
//   0  well-posed model / successful run / equivalent analyses
//   1  usage or input error
//   2  structurally singular model (analyze)
//   3  the two analysis paths disagree (diff)

#include "hsa/analysis.hpp"
#include "hsa/bench.hpp"
#include "hsa/cost_model.hpp"
#include "hsa/dot.hpp"
#include "hsa/errors.hpp"
#include "hsa/flat_oracle.hpp"
#include "hsa/generator.hpp"
#include "hsa/graph.hpp"
#include "hsa/index_reduction.hpp"
#include "hsa/model.hpp"
#include "hsa/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

/// Derivative cap: built-in default, overridden by HSA_DERIV_CAP,
/// overridden by --deriv-cap.
int env_deriv_cap() {
    const char* s = std::getenv("HSA_DERIV_CAP");
    if (!s) return hsa::kDefaultDerivCap;
    try {
        int v = std::stoi(s);
        if (v > 0) return v;
    } catch (...) {
    }
    std::cerr << "warning: ignoring invalid HSA_DERIV_CAP value '" << s << "'\n";
    return hsa::kDefaultDerivCap;
}

struct AnalyzeArgs {
    std::string path;
    bool flat = false;
    bool json = false;
    std::string dot_dir;
    int deriv_cap = hsa::kDefaultDerivCap;
    bool parallel = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

/// Rebuild one graph for DOT emission. On an augmentation failure the
/// plain (unaugmented) incidence graph is drawn without a partition.
void emit_dot(const std::filesystem::path& file, const std::vector<hsa::Equation>& equations,
              const std::set<hsa::VarRef>& vars, const std::set<std::string>& bases,
              const hsa::KnownFilter& known, hsa::ModelKind kind,
              const hsa::AnalysisOptions& opts, std::string* diff_table) {
    hsa::BipartiteGraph g;
    hsa::Matching m;
    bool partitioned = true;

    if (kind == hsa::ModelKind::Nlae) {
        g = hsa::build_graph(equations, vars);
        m = hsa::max_matching(g, opts.match_seed);
    } else {
        hsa::SsOptions so;
        so.deriv_cap = opts.deriv_cap;
        so.known = known;
        hsa::SsResult res = hsa::ss_matching(equations, bases, so);
        if (res.ok()) {
            g = std::move(res.system.graph);
            m = std::move(res.system.matching);
            if (diff_table) *diff_table = hsa::diff_log_table(res.system.diff_log);
        } else {
            std::set<hsa::VarRef> occurring;
            for (const hsa::Equation& e : equations)
                for (const hsa::Occurrence& o : e.occurrences)
                    if (bases.count(o.var.base)) occurring.insert(o.var);
            g = hsa::build_graph(equations, occurring);
            m = hsa::max_matching(g, opts.match_seed);
            partitioned = false;
        }
    }

    if (partitioned) {
        hsa::DmPartition part = hsa::dm_partition_with(g, m);
        write_file(file, hsa::to_dot(g, &m, &part));
    } else {
        write_file(file, hsa::to_dot(g, &m, nullptr));
    }
}

void collect_defs(const hsa::ModelDef& def, const hsa::ModelRegistry& reg,
                  std::map<std::string, const hsa::ModelDef*>& out) {
    for (const hsa::ComponentInstance& ci : def.components) {
        const hsa::ModelDef& child = reg.def(ci.def_name);
        if (out.emplace(child.name, &child).second) collect_defs(child, reg, out);
    }
}

void write_dot_files(const AnalyzeArgs& a, const hsa::ModelRegistry& reg,
                     hsa::DecompositionCache& cache, const hsa::AnalysisOptions& opts) {
    namespace fs = std::filesystem;
    const fs::path dir(a.dot_dir);
    fs::create_directories(dir);
    const hsa::ModelDef& root = reg.root_def();
    const hsa::ModelKind kind = root.kind;

    std::string diff_table;
    if (a.flat) {
        hsa::FlatModel flat = hsa::flatten(root, reg);
        std::set<hsa::VarRef> vars;
        for (const std::string& v : flat.variables) vars.insert(hsa::VarRef{v, 0});
        emit_dot(dir / "root.dot", flat.equations, vars, flat.variables, {}, kind, opts,
                 &diff_table);
    } else {
        hsa::DummyModel dummy = kind == hsa::ModelKind::Nlae
                                    ? hsa::build_dummy_nlae(root, reg, cache, opts)
                                    : hsa::build_dummy_dae(root, reg, cache, opts);
        emit_dot(dir / "root.dot", dummy.equations, dummy.variables, dummy.unknown_bases,
                 dummy.known, kind, opts, &diff_table);

        std::map<std::string, const hsa::ModelDef*> defs;
        collect_defs(root, reg, defs);
        for (const auto& [name, def] : defs) {
            hsa::DummyModel d = kind == hsa::ModelKind::Nlae
                                    ? hsa::build_dummy_nlae(*def, reg, cache, opts)
                                    : hsa::build_dummy_dae(*def, reg, cache, opts);
            emit_dot(dir / (name + ".dot"), d.equations, d.variables, d.unknown_bases, d.known,
                     kind, opts, nullptr);
        }
    }
    if (kind == hsa::ModelKind::Dae && !diff_table.empty())
        write_file(dir / "diff_log.txt", diff_table);
}

int run_analyze(const AnalyzeArgs& a) {
    hsa::ModelRegistry reg = hsa::parse_model(read_file(a.path));

    hsa::AnalysisOptions opts;
    opts.deriv_cap = a.deriv_cap;
    opts.parallel_components = a.parallel;
    if (a.seed_set) opts.match_seed = a.seed;

    hsa::DecompositionCache cache;
    hsa::AnalysisReport rep =
        a.flat ? hsa::analyze_flat(reg, opts) : hsa::analyze(reg, cache, opts);

    std::cout << (a.json ? hsa::report_to_json(rep) : hsa::report_to_text(rep));
    if (!a.dot_dir.empty()) write_dot_files(a, reg, cache, opts);
    return rep.singular ? 2 : 0;
}

struct DiffArgs {
    std::string path;
    bool json = false;
    int deriv_cap = hsa::kDefaultDerivCap;
    bool inject_fault = false;
};

int run_diff(const DiffArgs& a) {
    hsa::ModelRegistry reg = hsa::parse_model(read_file(a.path));

    hsa::AnalysisOptions opts;
    opts.deriv_cap = a.deriv_cap;
    opts.inject_dummy_fault = a.inject_fault;

    hsa::DecompositionCache cache;
    hsa::AnalysisReport hier = hsa::analyze(reg, cache, opts);

    hsa::AnalysisOptions flat_opts = opts;
    flat_opts.inject_dummy_fault = false;
    hsa::AnalysisReport flat = hsa::analyze_flat(reg, flat_opts);

    hsa::EquivalenceResult eq = hsa::check_equivalence(hier, flat);
    if (a.json) {
        nlohmann::json j;
        j["equivalent"] = eq.equivalent;
        j["mismatches"] = eq.mismatches;
        j["hierarchical"] = nlohmann::json::parse(hsa::report_to_json(hier));
        j["flattened"] = nlohmann::json::parse(hsa::report_to_json(flat));
        std::cout << j.dump(2) << "\n";
    } else if (eq.equivalent) {
        std::cout << "equivalent: hierarchical and flattened analyses agree (verdict: "
                  << (hier.singular ? "singular" : "well-posed") << ")\n";
    } else {
        std::cout << "NOT equivalent:\n";
        for (const std::string& m : eq.mismatches) std::cout << "  - " << m << "\n";
    }
    return eq.equivalent ? 0 : 3;
}

struct GenArgs {
    std::string out;
    hsa::GenParams params;
    std::string kind = "nlae";
};

int run_gen(const GenArgs& a) {
    hsa::GenParams p = a.params;
    p.kind = a.kind == "dae" ? hsa::ModelKind::Dae : hsa::ModelKind::Nlae;
    std::string text = hsa::serialize_model(hsa::generate_model(p));
    if (a.out == "-")
        std::cout << text;
    else
        write_file(a.out, text);
    return 0;
}

struct BenchArgs {
    std::string out = "-";
    bool analytic = false;
    std::vector<double> ns = {1000};
    std::vector<double> ks = {4};
    std::vector<double> rs = {0.1};
    double c0 = 6.0;
    int levels = 2;
    int repeats = 5;
    std::string kind = "nlae";
    std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& a) {
    std::string csv;
    if (a.analytic) {
        csv = hsa::curves_to_csv(hsa::cost_curves(a.ns, a.ks, a.rs, a.c0));
    } else {
        hsa::BenchConfig cfg;
        cfg.repeats = a.repeats;
        std::uint64_t seed = a.seed;
        for (double n : a.ns) {
            for (double k : a.ks) {
                for (double r : a.rs) {
                    hsa::GenParams p;
                    p.k = static_cast<int>(k);
                    p.n_per_component =
                        std::max(4, static_cast<int>(std::llround(n / (k + 1.0))));
                    p.r = r;
                    p.c0 = a.c0;
                    p.levels = a.levels;
                    p.kind = a.kind == "dae" ? hsa::ModelKind::Dae : hsa::ModelKind::Nlae;
                    p.seed = seed++;
                    cfg.grid.push_back(p);
                }
            }
        }
        csv = hsa::bench_to_csv(hsa::run_bench(cfg));
    }
    if (a.out == "-")
        std::cout << csv;
    else
        write_file(a.out, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural analysis of hierarchical equation-oriented models"};
    app.require_subcommand(1);
    const int default_cap = env_deriv_cap();

    AnalyzeArgs az;
    az.deriv_cap = default_cap;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Analyze a model and report its structural classification");
    analyze->add_option("model", az.path, "model file (JSON)")->required();
    bool hier_flag = false;
    CLI::Option* o_flat =
        analyze->add_flag("--flat", az.flat, "analyze the flattened expansion");
    CLI::Option* o_hier =
        analyze->add_flag("--hier", hier_flag, "analyze hierarchically (default)");
    o_flat->excludes(o_hier);
    o_hier->excludes(o_flat);
    bool text_flag = false;
    CLI::Option* o_json = analyze->add_flag("--json", az.json, "emit the report as JSON");
    CLI::Option* o_text =
        analyze->add_flag("--text", text_flag, "emit a human-readable report (default)");
    o_json->excludes(o_text);
    o_text->excludes(o_json);
    analyze->add_option("--dot", az.dot_dir,
                        "write Graphviz incidence graphs into this directory");
    analyze->add_option("--deriv-cap", az.deriv_cap,
                        "derivative cap for index reduction (env HSA_DERIV_CAP)");
    analyze->add_flag("--parallel", az.parallel,
                      "decompose same-depth definitions concurrently");
    CLI::Option* o_seed = analyze->add_option(
        "--seed", az.seed, "randomize matching traversal order with this seed");

    DiffArgs df;
    df.deriv_cap = default_cap;
    CLI::App* diff = app.add_subcommand(
        "diff", "Run both analysis paths and compare them");
    diff->add_option("model", df.path, "model file (JSON)")->required();
    diff->add_flag("--json", df.json, "emit the comparison as JSON");
    diff->add_option("--deriv-cap", df.deriv_cap,
                     "derivative cap for index reduction (env HSA_DERIV_CAP)");
    diff->add_flag("--inject-dummy-fault", df.inject_fault)->group(""); // test hook

    GenArgs gn;
    CLI::App* gen = app.add_subcommand("gen", "Generate a random hierarchical model");
    gen->add_option("-o,--output", gn.out, "output file ('-' for stdout)")->required();
    gen->add_option("--seed", gn.params.seed, "generator seed");
    gen->add_option("--n", gn.params.n_per_component, "node budget per definition");
    gen->add_option("--k", gn.params.k, "component instances under the root");
    gen->add_option("--r", gn.params.r, "target under-constrained node ratio");
    gen->add_option("--c0", gn.params.c0, "target average equation size");
    gen->add_option("--levels", gn.params.levels, "hierarchy depth");
    gen->add_option("--kind", gn.kind, "model kind")
        ->check(CLI::IsMember({"nlae", "dae"}));

    BenchArgs bn;
    CLI::App* bench = app.add_subcommand(
        "bench", "Time the analysis paths over a generated grid, as CSV");
    bench->add_option("-o,--output", bn.out, "output CSV file ('-' for stdout)");
    bench->add_flag("--analytic", bn.analytic,
                    "emit closed-form cost curves instead of timing runs");
    bench->add_option("--n", bn.ns, "total node counts");
    bench->add_option("--k", bn.ks, "component counts");
    bench->add_option("--r", bn.rs, "under-constrained ratios");
    bench->add_option("--c0", bn.c0, "average equation size");
    bench->add_option("--levels", bn.levels, "hierarchy depth of generated models");
    bench->add_option("--repeats", bn.repeats, "repeats per grid point (median)");
    bench->add_option("--kind", bn.kind, "model kind")
        ->check(CLI::IsMember({"nlae", "dae"}));
    bench->add_option("--seed", bn.seed, "base seed for the grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (analyze->parsed()) {
            az.seed_set = o_seed->count() > 0;
            return run_analyze(az);
        }
        if (diff->parsed()) return run_diff(df);
        if (gen->parsed()) return run_gen(gn);
        if (bench->parsed()) return run_bench(bn);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
