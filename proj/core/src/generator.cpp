#include "hsa/generator.hpp"

#include "hsa/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hsa {

namespace {

/// Node layout of one generated definition: a square core of `core`
/// variables and equations, plus a chain of `chain` variables linked by
/// chain-1 equations. The chain is the definition's under-constrained
/// part: 2*chain-1 nodes.
struct Shape {
    int core = 0;
    int chain = 0;

    int under_nodes() const { return chain > 0 ? 2 * chain - 1 : 0; }
    int nodes() const { return 2 * core + under_nodes(); }
};

Shape shape_for(int n, double r) {
    Shape s;
    int u = static_cast<int>(std::lround(r * n));
    if (r > 0.0 && u < 1) u = 1;
    s.chain = u > 0 ? (u + 1) / 2 : 0;
    s.core = std::max(1, (n - s.under_nodes()) / 2);
    return s;
}

/// Uniform pick in [0, n) off the generator's raw stream; kept free of
/// std::uniform_int_distribution so output is identical across standard
/// library implementations.
std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

struct ChildSlot {
    std::string def_name;
    std::string instance;
};

class DefBuilder {
public:
    DefBuilder(const GenParams& p, const Shape& s, std::mt19937_64& rng)
        : p_(p), shape_(s), rng_(rng) {}

    ModelDef build(const std::string& name, const std::vector<ChildSlot>& children,
                   bool pin_own_chain) {
        core_eqs_.clear();
        chain_eqs_.clear();
        pin_eqs_.clear();

        ModelDef def;
        def.name = name;
        def.kind = p_.kind;

        for (int i = 1; i <= shape_.core; ++i) def.variables.push_back("y" + std::to_string(i));
        for (int j = 1; j <= shape_.chain; ++j) def.variables.push_back("x" + std::to_string(j));

        // Square core: one equation per core variable along a random
        // permutation, guaranteeing a perfect matching on the core.
        std::vector<int> perm(shape_.core);
        for (int i = 0; i < shape_.core; ++i) perm[i] = i + 1;
        for (int i = shape_.core - 1; i > 0; --i)
            std::swap(perm[i], perm[pick(rng_, static_cast<std::size_t>(i) + 1)]);
        for (int i = 1; i <= shape_.core; ++i) {
            Equation e;
            e.id = "f" + std::to_string(i);
            e.occurrences.push_back(occ("y" + std::to_string(perm[i - 1])));
            core_eqs_.push_back(static_cast<int>(def.equations.size()));
            def.equations.push_back(std::move(e));
        }

        // Chain: x1 - g1 - x2 - g2 - ... ; one variable stays exposed, so
        // the whole chain is the definition's under-constrained part.
        for (int j = 1; j < shape_.chain; ++j) {
            Equation e;
            e.id = "g" + std::to_string(j);
            e.occurrences.push_back(occ("x" + std::to_string(j)));
            e.occurrences.push_back(occ("x" + std::to_string(j + 1)));
            chain_eqs_.push_back(static_cast<int>(def.equations.size()));
            def.equations.push_back(std::move(e));
        }

        if (pin_own_chain && shape_.chain >= 1) {
            Equation e;
            e.id = "ground";
            e.occurrences.push_back(pin_occ("x1"));
            pin_eqs_.push_back(static_cast<int>(def.equations.size()));
            def.equations.push_back(std::move(e));
        }

        // One coupling equation per component: it pins the chain head the
        // component leaves exposed, closing that degree of freedom here.
        int child_no = 0;
        for (const ChildSlot& c : children) {
            def.components.push_back({c.instance, c.def_name});
            if (shape_.chain < 1) continue;
            Equation e;
            e.id = "couple" + std::to_string(++child_no);
            e.occurrences.push_back(pin_occ(c.instance + ".x1"));
            pin_eqs_.push_back(static_cast<int>(def.equations.size()));
            def.equations.push_back(std::move(e));
        }

        sprinkle_extra_edges(def);
        for (Equation& e : def.equations) e.normalize();
        return def;
    }

private:
    /// A random occurrence of `base`; DAE models get derivative orders of
    /// at most 2, which leaves the order-collapsed structure unchanged.
    Occurrence occ(const std::string& base) {
        Occurrence o;
        o.var.base = base;
        if (p_.kind == ModelKind::Dae) {
            std::size_t t = pick(rng_, 10);
            o.var.order = t < 6 ? 0 : t < 9 ? 1 : 2;
            o.linear_ti = pick(rng_, 4) == 0;
        }
        return o;
    }

    /// Coupling/ground references stay at order 0 so they always pin the
    /// chain head variable itself.
    static Occurrence pin_occ(const std::string& base) { return {{base, 0}, false}; }

    /// Raise the mean equation size towards c0 with random extra edges.
    /// Pools are chosen so the partition stays exact by construction: a
    /// core equation never gains a chain variable (the core must stay
    /// forced onto core variables in every maximum matching), and pin
    /// equations never gain chain variables (they must stay forced onto
    /// the chain heads they pin).
    void sprinkle_extra_edges(ModelDef& def) {
        long base_occ = 0;
        for (const Equation& e : def.equations) base_occ += static_cast<long>(e.occurrences.size());
        long want = std::lround(p_.c0 * static_cast<double>(def.equations.size())) - base_occ;
        if (want <= 0 || def.equations.empty()) return;

        std::vector<std::set<std::string>> used(def.equations.size());
        for (std::size_t i = 0; i < def.equations.size(); ++i)
            for (const Occurrence& o : def.equations[i].occurrences) used[i].insert(o.var.base);

        std::vector<int> all_eqs;
        all_eqs.insert(all_eqs.end(), core_eqs_.begin(), core_eqs_.end());
        all_eqs.insert(all_eqs.end(), chain_eqs_.begin(), chain_eqs_.end());
        all_eqs.insert(all_eqs.end(), pin_eqs_.begin(), pin_eqs_.end());

        std::set<int> chain_ok(chain_eqs_.begin(), chain_eqs_.end());
        long added = 0;
        for (long attempt = 0; added < want && attempt < want * 20; ++attempt) {
            int ei = all_eqs[pick(rng_, all_eqs.size())];
            bool may_use_chain = chain_ok.count(ei) > 0;
            int var_space = shape_.core + (may_use_chain ? shape_.chain : 0);
            if (var_space == 0) break;
            int vi = static_cast<int>(pick(rng_, static_cast<std::size_t>(var_space)));
            std::string base = vi < shape_.core ? "y" + std::to_string(vi + 1)
                                                : "x" + std::to_string(vi - shape_.core + 1);
            if (!used[static_cast<std::size_t>(ei)].insert(base).second) continue;
            def.equations[static_cast<std::size_t>(ei)].occurrences.push_back(occ(base));
            ++added;
        }
    }

    const GenParams& p_;
    const Shape& shape_;
    std::mt19937_64& rng_;
    std::vector<int> core_eqs_, chain_eqs_, pin_eqs_;
};

} // namespace

ModelRegistry generate_model(const GenParams& p) {
    if (p.n_per_component < 2)
        throw ModelError("generator: node budget must be at least 2 per definition");
    if (p.r < 0.0 || p.r > 1.0) throw ModelError("generator: r must lie in [0, 1]");
    if (p.c0 < 1.0) throw ModelError("generator: c0 must be at least 1");
    if (p.k < 0) throw ModelError("generator: k must be nonnegative");
    if (p.levels < 1) throw ModelError("generator: levels must be at least 1");

    std::mt19937_64 rng(p.seed);
    const Shape shape = shape_for(p.n_per_component, p.r);
    const int depth = p.levels;
    const int k = depth == 1 ? 0 : p.k;

    ModelRegistry reg;
    DefBuilder builder(p, shape, rng);

    // Each branch below the root is a chain of depth-1 definitions; the
    // definition names are unique, so no decomposition is shared and the
    // cold hierarchical path really performs k * (depth-1) analyses.
    for (int i = 1; i <= k; ++i) {
        for (int d = depth - 1; d >= 1; --d) {
            std::string name = "sub_" + std::to_string(i) + "_" + std::to_string(d);
            std::vector<ChildSlot> children;
            if (d < depth - 1)
                children.push_back({"sub_" + std::to_string(i) + "_" + std::to_string(d + 1), "s"});
            reg.defs.push_back(builder.build(name, children, false));
        }
    }

    std::vector<ChildSlot> top_children;
    for (int i = 1; i <= k; ++i)
        top_children.push_back({"sub_" + std::to_string(i) + "_1", "m" + std::to_string(i)});
    reg.defs.push_back(builder.build("top", top_children, true));
    reg.root = "top";

    nlohmann::json meta;
    meta["generator"] = {
        {"seed", p.seed},
        {"n_per_component", p.n_per_component},
        {"k", k},
        {"r", p.r},
        {"c0", p.c0},
        {"levels", depth},
        {"kind", to_string(p.kind)},
        {"achieved_r",
         shape.nodes() > 0 ? static_cast<double>(shape.under_nodes()) / shape.nodes() : 0.0},
    };
    reg.meta_json = meta.dump();

    validate(reg);
    return reg;
}

} // namespace hsa
