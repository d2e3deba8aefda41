#include "support.hpp"

#include "hsa/errors.hpp"
#include "hsa/index_reduction.hpp"
#include "hsa/model.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace hsa;
using namespace hsa::test;

namespace {

/// The four-equation dynamic example used across the suite.
std::vector<Equation> vessel_eqs() {
    return {
        mk_eq("e1", {{"U", 1, true}, {"P"}, {"V", 1}}),
        mk_eq("e2", {{"V", 0, true}}),
        mk_eq("e3", {{"P"}, {"V"}, {"T", 0, true}}),
        mk_eq("e4", {{"U", 0, true}, {"T", 0, true}}),
    };
}

std::set<std::string> vessel_bases() { return {"U", "V", "P", "T"}; }

std::set<VarRef> occ_vars(const Equation& e) {
    std::set<VarRef> out;
    for (const Occurrence& o : e.occurrences) out.insert(o.var);
    return out;
}

std::set<std::string> id_set(const std::vector<Equation>& eqs) {
    std::set<std::string> out;
    for (const Equation& e : eqs) out.insert(e.id);
    return out;
}

} // namespace

// ==== structural differentiation =============================================

TEST_CASE("differentiate_structurally: keeps nonlinear appearances, shifts linear ones") {
    const Equation e3 = mk_eq("e3", {{"P"}, {"V"}, {"T", 0, true}});
    const Equation d = differentiate_structurally(e3);
    CHECK(d.id == "e3'");
    CHECK(d.diff_count == 1);
    // P and V appear nonlinearly: both the appearance and its derivative
    // remain. T appears linearly with a constant coefficient: only T'.
    CHECK(occ_vars(d) == var_set({{"P"}, {"P", 1}, {"V"}, {"V", 1}, {"T", 1}}));

    const Equation e2 = mk_eq("e2", {{"V", 0, true}});
    const Equation d2 = differentiate_structurally(e2);
    CHECK(d2.id == "e2'");
    CHECK(occ_vars(d2) == var_set({{"V", 1}}));

    const Equation d2twice = differentiate_structurally(d2);
    CHECK(d2twice.id == "e2''");
    CHECK(d2twice.diff_count == 2);
    CHECK(occ_vars(d2twice) == var_set({{"V", 2}}));
}

TEST_CASE("differentiate_structurally: derivative of a mixed-order equation") {
    const Equation e1 = mk_eq("e1", {{"U", 1, true}, {"P"}, {"V", 1}});
    const Equation d = differentiate_structurally(e1);
    CHECK(occ_vars(d) == var_set({{"U", 2}, {"P"}, {"P", 1}, {"V", 1}, {"V", 2}}));
    // The derivative of a linear-TI term is itself linear-TI.
    const Occurrence* u2 = d.find(VarRef{"U", 2});
    REQUIRE(u2 != nullptr);
    CHECK(u2->linear_ti);
}

TEST_CASE("differentiate_structurally: cap and known filter") {
    Equation e = mk_eq("e", {{"x"}});
    e.diff_count = 1;
    CHECK_THROWS_AS(differentiate_structurally(e, 1), ModelError);

    const KnownFilter known{{"P", 1}};
    const Equation e3 = mk_eq("e3", {{"P"}, {"V"}, {"T", 0, true}});
    const Equation d = differentiate_structurally(e3, kDefaultDerivCap, &known);
    // P' is a known quantity and is dropped; P itself (order 0) stays.
    CHECK(occ_vars(d) == var_set({{"P"}, {"V"}, {"V", 1}, {"T", 1}}));
}

// ==== matching-driven augmentation ===========================================

TEST_CASE("ss_matching: vessel example trace") {
    const SsResult res = ss_matching(vessel_eqs(), vessel_bases());
    REQUIRE(res.ok());

    const AugmentedSystem& sys = res.system;
    CHECK(sys.diff_log ==
          std::map<std::string, int>{{"e1", 0}, {"e2", 1}, {"e3", 1}, {"e4", 1}});
    CHECK(sys.equations.size() == 7);
    CHECK(id_set(sys.equations) ==
          std::set<std::string>{"e1", "e2", "e2'", "e3", "e3'", "e4", "e4'"});

    // Every base reaches order one: eight variable nodes, all seven copies
    // matched, one dynamic degree of freedom.
    CHECK(sys.graph.n_vars() == 8);
    CHECK(sys.graph.n_eqs() == 7);
    CHECK(sys.matching.cardinality == 7);
    CHECK(sys.exposed_var_count() == 1);

    // Inputs come first, derivatives after.
    CHECK(sys.equations[0].id == "e1");
    CHECK(sys.equations[3].id == "e4");
    for (int i = 4; i < 7; ++i) CHECK(sys.equations[i].diff_count == 1);
}

TEST_CASE("ss_matching: already-first-order system needs no differentiation") {
    const std::vector<Equation> eqs = {mk_eq("e", {{"x"}, {"x", 1}})};
    const SsResult res = ss_matching(eqs, {"x"});
    REQUIRE(res.ok());
    CHECK(res.system.diff_log == std::map<std::string, int>{{"e", 0}});
    CHECK(res.system.equations.size() == 1);
    CHECK(res.system.graph.n_vars() == 2); // x, x'
    CHECK(res.system.matching.cardinality == 1);
    CHECK(res.system.exposed_var_count() == 1);
}

TEST_CASE("ss_matching: occurrences outside the unknowns are dropped") {
    // y is known from order 1 up; its first derivative in `f` is not a node.
    const std::vector<Equation> eqs = {mk_eq("f", {{"x", 1}, {"y", 1}})};
    SsOptions opts;
    opts.known = {{"y", 1}};
    const SsResult res = ss_matching(eqs, {"x", "y"}, opts);
    REQUIRE(res.ok());
    // y' is filtered out, but y itself (order 0) is still an unknown node.
    CHECK(res.system.graph.n_vars() == 3); // x, x', y
    CHECK(res.system.graph.var_index(VarRef{"y", 1}) == -1);
    CHECK(res.system.graph.var_index(VarRef{"y", 0}) >= 0);
    CHECK(res.system.matching.cardinality == 1);
    CHECK(res.system.exposed_var_count() == 2);

    // A base entirely outside unknown_bases is invisible.
    const std::vector<Equation> eqs2 = {mk_eq("g", {{"x", 1}, {"ext"}})};
    const SsResult res2 = ss_matching(eqs2, {"x"});
    REQUIRE(res2.ok());
    CHECK(res2.system.graph.var_index(VarRef{"ext", 0}) == -1);
}

TEST_CASE("ss_matching: duplicate constraints are structurally deficient") {
    const std::vector<Equation> eqs = {mk_eq("f", {{"y"}}), mk_eq("g", {{"y"}})};
    const SsResult res = ss_matching(eqs, {"y"});
    CHECK(res.status == SsStatus::Deficient);
    CHECK_FALSE(res.ok());
    CHECK(res.problem_equations == std::vector<std::string>{"f", "g"});
    CHECK(res.message.find("cannot be assigned") != std::string::npos);
}

TEST_CASE("ss_matching: derivative cap exhaustion") {
    SsOptions opts;
    opts.deriv_cap = 0;
    const SsResult res = ss_matching(vessel_eqs(), vessel_bases(), opts);
    CHECK(res.status == SsStatus::CapExceeded);
    CHECK(res.message.find("derivative cap") != std::string::npos);
    CHECK_FALSE(res.problem_equations.empty());
}

// ==== derivative lineages in the input =======================================

TEST_CASE("ss_matching: input derivative copies are reused, not recreated") {
    // f' is the structural derivative of f, as an imported under part would
    // contain it. The augmentation must link the pair instead of deriving a
    // second copy of f.
    const std::vector<Equation> eqs = {
        mk_eq("f", {{"y"}}),
        mk_eq("f'", {{"y"}, {"y", 1}}),
    };
    const SsResult res = ss_matching(eqs, {"y"});
    REQUIRE(res.ok());
    CHECK(res.system.equations.size() == 2); // nothing new created

    std::set<std::string> ids = id_set(res.system.equations);
    CHECK(ids == std::set<std::string>{"f", "f'"});
    CHECK(res.system.matching.cardinality == 2);
    CHECK(res.system.diff_log == std::map<std::string, int>{{"f", 0}, {"f'", 0}});
}

TEST_CASE("ss_matching: lineage copies pool onto one origin in the deficiency check") {
    // f and f' are one lineage over base y; g is a second, independent
    // constraint on y. Two origins, one base: deficient.
    const std::vector<Equation> eqs = {
        mk_eq("f", {{"y"}}),
        mk_eq("f'", {{"y"}, {"y", 1}}),
        mk_eq("g", {{"y"}}),
    };
    const SsResult res = ss_matching(eqs, {"y"});
    CHECK(res.status == SsStatus::Deficient);
    // Offending equations are reported by origin id.
    for (const std::string& id : res.problem_equations)
        CHECK(id.find('\'') == std::string::npos);
}

TEST_CASE("ss_matching: orphan derivative ids are handled standalone") {
    // A derivative-styled id without its origin present is just an equation.
    const std::vector<Equation> eqs = {mk_eq("q'", {{"y"}, {"y", 1}})};
    const SsResult res = ss_matching(eqs, {"y"});
    REQUIRE(res.ok());
    CHECK(res.system.equations.size() == 1);
    CHECK(res.system.matching.cardinality == 1);
}

// ==== order invariance =======================================================

TEST_CASE("ss_matching: result is invariant under input permutation") {
    std::vector<Equation> eqs = vessel_eqs();
    std::sort(eqs.begin(), eqs.end(),
              [](const Equation& a, const Equation& b) { return a.id < b.id; });
    const std::map<std::string, int> want{{"e1", 0}, {"e2", 1}, {"e3", 1}, {"e4", 1}};

    int tried = 0;
    do {
        const SsResult res = ss_matching(eqs, vessel_bases());
        CAPTURE(tried);
        REQUIRE(res.ok());
        CHECK(res.system.diff_log == want);
        CHECK(res.system.graph.n_vars() == 8);
        CHECK(res.system.exposed_var_count() == 1);
        ++tried;
    } while (std::next_permutation(eqs.begin(), eqs.end(),
                                   [](const Equation& a, const Equation& b) {
                                       return a.id < b.id;
                                   }));
    CHECK(tried == 24);
}

// ==== differentiating the well part is conservative ==========================

TEST_CASE("ss_matching: appending a well-equation derivative leaves the under part alone") {
    const SsResult res = ss_matching(vessel_eqs(), vessel_bases());
    REQUIRE(res.ok());
    const AugmentedSystem& sys = res.system;
    const DmPartition before = dm_partition_with(sys.graph, sys.matching);
    CHECK(before.well_eqs == std::set<std::string>{"e2", "e2'"});
    CHECK(before.well_vars == var_set({{"V"}, {"V", 1}}));

    for (const std::string& wid : before.well_eqs) {
        const auto it = std::find_if(sys.equations.begin(), sys.equations.end(),
                                     [&](const Equation& e) { return e.id == wid; });
        REQUIRE(it != sys.equations.end());
        Equation d = differentiate_structurally(*it);
        if (id_set(sys.equations).count(d.id)) continue; // already in the system

        std::vector<Equation> eqs = sys.equations;
        eqs.push_back(d);
        std::vector<VarRef> nodes = sys.graph.var_nodes;
        for (const Occurrence& o : d.occurrences) nodes.push_back(o.var);

        const DmPartition after = dm_decompose(build_graph(eqs, nodes));
        CAPTURE(wid);
        CHECK(after.under_vars == before.under_vars);
        CHECK(after.under_eqs == before.under_eqs);
    }
}
