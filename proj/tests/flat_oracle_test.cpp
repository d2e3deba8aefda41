#include "support.hpp"

#include "hsa/analysis.hpp"
#include "hsa/bench.hpp"
#include "hsa/cost_model.hpp"
#include "hsa/flat_oracle.hpp"
#include "hsa/generator.hpp"
#include "hsa/model.hpp"
#include "hsa/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hsa;
using namespace hsa::test;

namespace {

ModelRegistry load(const std::string& fixture) {
    return parse_model(read_file(fixture_path(fixture)));
}

std::set<std::string> as_set(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

AnalysisOptions quiet() {
    AnalysisOptions o;
    o.collect_timings = false;
    return o;
}

} // namespace

// ==== flattened reference path ===============================================

TEST_CASE("analyze_flat: primary chain example") {
    const AnalysisReport rep = analyze_flat(load("eq3.json"));
    CHECK(rep.mode == "flat");
    CHECK(rep.kind == "nlae");
    CHECK(rep.singular);
    CHECK(rep.over_equations == std::vector<std::string>{"e1", "e2", "e3"});
    CHECK(rep.over_variables == std::vector<std::string>{"v1", "v2"});
    CHECK(as_set(rep.under_variables) == std::set<std::string>{"v5", "v6", "v7"});
    CHECK(rep.under_equations == std::vector<std::string>{"e6", "e7"});
    CHECK(rep.well_count == 2);
}

TEST_CASE("analyze_flat: dynamic example via augmentation") {
    const AnalysisReport rep = analyze_flat(load("eq7.json"));
    CHECK(rep.kind == "dae");
    CHECK_FALSE(rep.singular);
    CHECK(rep.dof == 1);
    CHECK(as_set(rep.under_equations) ==
          std::set<std::string>{"e1", "e3", "e3'", "e4", "e4'"});
}

// ==== equivalence comparison =================================================

TEST_CASE("check_equivalence: identical reports are equivalent") {
    const ModelRegistry reg = load("eq3_hier.json");
    const AnalysisReport flat = analyze_flat(reg, quiet());
    const EquivalenceResult eq = check_equivalence(flat, flat);
    CHECK(eq.equivalent);
    CHECK(eq.mismatches.empty());
}

TEST_CASE("check_equivalence: each clause fires on a forced difference") {
    AnalysisReport a;
    a.model = "m";
    a.kind = "nlae";
    a.singular = false;
    AnalysisReport b = a;

    SUBCASE("kind") {
        b.kind = "dae";
        const EquivalenceResult eq = check_equivalence(a, b);
        CHECK_FALSE(eq.equivalent);
        REQUIRE_FALSE(eq.mismatches.empty());
        CHECK(eq.mismatches[0].find("kind differs") != std::string::npos);
    }
    SUBCASE("verdict") {
        b.singular = true;
        const EquivalenceResult eq = check_equivalence(a, b);
        CHECK_FALSE(eq.equivalent);
        CHECK(eq.mismatches[0].find("verdict differs") != std::string::npos);
    }
    SUBCASE("algebraic node sets") {
        b.under_variables = {"x"};
        const EquivalenceResult eq = check_equivalence(a, b);
        CHECK_FALSE(eq.equivalent);
        CHECK(eq.mismatches[0].find("under-constrained variables") != std::string::npos);
        CHECK(eq.mismatches[0].find("x") != std::string::npos);
    }
    SUBCASE("dynamic: degrees of freedom") {
        a.kind = b.kind = "dae";
        b.dof = 2;
        const EquivalenceResult eq = check_equivalence(a, b);
        CHECK_FALSE(eq.equivalent);
        CHECK(eq.mismatches[0].find("degrees of freedom differ") != std::string::npos);
    }
    SUBCASE("dynamic: deficiency presence") {
        a.kind = b.kind = "dae";
        a.singular = b.singular = true;
        DeficiencyReport d;
        d.kind = "redundant-constraints";
        b.deficiency = d;
        const EquivalenceResult eq = check_equivalence(a, b);
        CHECK_FALSE(eq.equivalent);
        CHECK(eq.mismatches[0].find("deficiency differs") != std::string::npos);
    }
    SUBCASE("dynamic: matching deficiencies end the comparison") {
        a.kind = b.kind = "dae";
        a.singular = b.singular = true;
        DeficiencyReport d;
        d.kind = "redundant-constraints";
        a.deficiency = d;
        b.deficiency = d;
        b.dof = 99; // would mismatch, but deficiency short-circuits
        CHECK(check_equivalence(a, b).equivalent);
    }
    SUBCASE("dynamic: exposed variable outside the flattened under part") {
        a.kind = b.kind = "dae";
        a.exposed_variables = {"q"};
        b.under_variables = {"w"};
        const EquivalenceResult eq = check_equivalence(a, b);
        CHECK_FALSE(eq.equivalent);
        CHECK(eq.mismatches[0].find("q") != std::string::npos);
    }
    SUBCASE("broken component: only the verdict counts") {
        a.component_violations.push_back(
            ComponentViolation{"bad", "over-constrained", {"p1"}});
        b.under_variables = {"x", "y"};
        CHECK(check_equivalence(a, b).equivalent);
        b.singular = true;
        CHECK_FALSE(check_equivalence(a, b).equivalent);
    }
}

// ==== generator ==============================================================

TEST_CASE("generate_model: deterministic in the seed") {
    GenParams p;
    p.n_per_component = 50;
    p.k = 4;
    p.r = 0.1;
    p.levels = 2;
    p.seed = 7;
    const std::string a = serialize_model(generate_model(p));
    const std::string b = serialize_model(generate_model(p));
    CHECK(a == b);

    p.seed = 8;
    CHECK(serialize_model(generate_model(p)) != a);
}

TEST_CASE("generate_model: golden output is stable") {
    GenParams p;
    p.n_per_component = 50;
    p.k = 4;
    p.r = 0.1;
    p.levels = 2;
    p.seed = 7;
    CHECK(serialize_model(generate_model(p)) == read_file(fixture_path("gen_golden.json")));
}

TEST_CASE("generate_model: well-posed by construction") {
    for (const ModelKind kind : {ModelKind::Nlae, ModelKind::Dae}) {
        GenParams p;
        p.n_per_component = 36;
        p.k = 3;
        p.r = 0.15;
        p.levels = 3;
        p.kind = kind;
        p.seed = 21;
        const ModelRegistry reg = generate_model(p);
        CAPTURE(static_cast<int>(kind));
        CHECK(level_of(reg.root_def(), reg) == 2); // depth levels-1 below the root

        DecompositionCache cache;
        const AnalysisReport hier = analyze(reg, cache, quiet());
        CHECK_FALSE(hier.singular);
        CHECK(check_equivalence(hier, analyze_flat(reg, quiet())).equivalent);
    }
}

TEST_CASE("generate_model: r = 0 leaves every component square") {
    GenParams p;
    p.n_per_component = 30;
    p.k = 3;
    p.r = 0.0;
    p.seed = 9;
    const ModelRegistry reg = generate_model(p);
    DecompositionCache cache;
    const AnalysisReport rep = analyze(reg, cache, quiet());
    CHECK_FALSE(rep.singular);
    CHECK(rep.dof == 0);
    CHECK(rep.exposed_variables.empty());
    for (const ModelDef& d : reg.defs) {
        if (d.name == reg.root) continue;
        const auto dec = cache.find(d.name);
        REQUIRE(dec != nullptr);
        CHECK(dec->under_node_count == 0);
    }
}

TEST_CASE("generate_model: primary generation at levels = 1") {
    GenParams p;
    p.n_per_component = 40;
    p.levels = 1;
    p.seed = 2;
    const ModelRegistry reg = generate_model(p);
    CHECK(reg.defs.size() == 1);
    CHECK(reg.root_def().is_primary());
    DecompositionCache cache;
    CHECK_FALSE(analyze(reg, cache, quiet()).singular);
}

TEST_CASE("generate_model: dynamic kind bounds derivative orders") {
    GenParams p;
    p.n_per_component = 40;
    p.k = 2;
    p.kind = ModelKind::Dae;
    p.seed = 13;
    const ModelRegistry reg = generate_model(p);
    for (const ModelDef& d : reg.defs) {
        CHECK(d.kind == ModelKind::Dae);
        for (const Equation& e : d.equations)
            for (const Occurrence& o : e.occurrences) {
                CHECK(o.var.order >= 0);
                CHECK(o.var.order <= 2);
            }
    }
}

TEST_CASE("generate_model: achieved under-constrained ratio lands near target") {
    GenParams p;
    p.n_per_component = 100;
    p.k = 4;
    p.r = 0.1;
    p.seed = 31;
    const ModelRegistry reg = generate_model(p);
    const auto meta = nlohmann::json::parse(reg.meta_json);
    const double achieved = meta.at("generator").at("achieved_r").get<double>();
    CHECK(achieved > 0.07);
    CHECK(achieved < 0.13);
}

// ==== cost model =============================================================

TEST_CASE("cost model: closed-form spot values") {
    // n^{5/2} + (2c+3)n at n=100, c=6: 100000 + 1500.
    CHECK(cost_component(100, 6) == doctest::Approx(101500.0).epsilon(1e-12));
    // n^3 + (2c+3)n at n=100, c=6: 1000000 + 1500.
    CHECK(cost_component_dae(100, 6) == doctest::Approx(1001500.0).epsilon(1e-12));

    CostStats one;
    one.n_i = {100};
    one.u_i = {0};
    one.n0 = 100;
    one.c = 6;
    CHECK(predict_cost(one, CostKind::Component) == doctest::Approx(101500.0));
    // 100^{5/2} + 6*100 + (100+0)^{5/2}
    CHECK(predict_cost(one, CostKind::Total) == doctest::Approx(200600.0));
    // (100+0)^{5/2} + 6*0
    CHECK(predict_cost(one, CostKind::Reuse) == doctest::Approx(100000.0));
    // (100+100)^{5/2} + 200
    CHECK(predict_cost(one, CostKind::Flattened) ==
          doctest::Approx(std::pow(200.0, 2.5) + 200.0));
}

TEST_CASE("cost model: monotone in every size input") {
    CostStats s;
    s.n_i = {50, 50};
    s.u_i = {5, 5};
    s.n0 = 40;
    s.c = 6;
    for (const CostKind kind : {CostKind::Component, CostKind::Total, CostKind::Reuse,
                                CostKind::Flattened}) {
        CostStats bigger = s;
        bigger.n_i[0] += 10;
        bigger.u_i[0] += 1;
        bigger.n0 += 10;
        CAPTURE(static_cast<int>(kind));
        CHECK(predict_cost(bigger, kind) >= predict_cost(s, kind));
    }
}

TEST_CASE("cost model: curves keep the expected ordering at every grid point") {
    const std::vector<CurvePoint> pts = cost_curves();
    CHECK(pts.size() == 27); // 3 sizes x 3 branching factors x 3 ratios
    for (const CurvePoint& pt : pts) {
        CAPTURE(pt.n);
        CAPTURE(pt.k);
        CAPTURE(pt.r);
        CHECK(pt.c_reuse <= pt.c_total);
        CHECK(pt.c_total <= pt.c_flattened);
        CHECK(pt.c_reuse > 0);
    }
}

TEST_CASE("cost model: CSV rendering") {
    const std::string csv = curves_to_csv(cost_curves({100}, {2}, {0.1}));
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,k,r,c_total,c_reuse,c_flattened");
    std::string row;
    REQUIRE(std::getline(in, row));
    double n, k, r, ct, cr, cf;
    char comma;
    std::istringstream rowIn(row);
    rowIn >> n >> comma >> k >> comma >> r >> comma >> ct >> comma >> cr >> comma >> cf;
    CHECK(n == 100);
    CHECK(k == 2);
    CHECK(cr <= ct);
    CHECK(ct <= cf);
}

// ==== benchmark harness ======================================================

TEST_CASE("run_bench: rows, fields and CSV schema") {
    BenchConfig cfg;
    cfg.repeats = 2;
    GenParams a;
    a.n_per_component = 24;
    a.k = 2;
    a.r = 0.15;
    a.seed = 3;
    cfg.grid.push_back(a);
    GenParams b = a;
    b.kind = ModelKind::Dae;
    b.seed = 4;
    cfg.grid.push_back(b);

    const std::vector<BenchRow> rows = run_bench(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].kind == "nlae");
    CHECK(rows[1].kind == "dae");
    for (const BenchRow& row : rows) {
        CHECK(row.n_total > 0);
        CHECK(row.t_flat_ms > 0.0);
        CHECK(row.t_hier_cold_ms > 0.0);
        CHECK(row.t_hier_warm_ms > 0.0);
        CHECK(row.achieved_r > 0.0);
        CHECK(row.achieved_r < 1.0);
    }

    const std::string csv = bench_to_csv(rows);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "seed,n_total,k,r,kind,t_flat_ms,t_hier_cold_ms,t_hier_warm_ms,achieved_r");
    int dataLines = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++dataLines;
    CHECK(dataLines == 2);
}
