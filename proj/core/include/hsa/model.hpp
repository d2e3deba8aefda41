#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hsa {

/// Upper bound on the derivative order accepted from model files. Orders
/// produced internally by index reduction are bounded separately by the
/// derivative cap; this limit only guards against absurd input.
inline constexpr int kMaxParsedOrder = 64;

/// A variable reference: a (possibly instance-qualified) base name plus a
/// derivative order. Order 0 is the variable itself, order k its k-th time
/// derivative. Ordered lexicographically by (base, order) so that every
/// container iteration is deterministic.
struct VarRef {
    std::string base;
    int order = 0;

    auto operator<=>(const VarRef&) const = default;

    /// Render as base followed by one apostrophe per derivative order,
    /// e.g. {"C.v", 2} -> "C.v''".
    std::string display() const;

    /// Same reference seen from an enclosing scope: "inst." is prepended
    /// to the base name.
    VarRef qualified(const std::string& instance) const;
};

/// One appearance of a variable reference inside an equation. `linear_ti`
/// marks an appearance that is linear with a time-invariant coefficient;
/// differentiating such a term replaces the appearance by its derivative
/// instead of keeping both.
struct Occurrence {
    VarRef var;
    bool linear_ti = false;

    auto operator<=>(const Occurrence&) const = default;
};

/// A single equation: an id plus the set of variable references occurring
/// in it. Occurrences are kept sorted by VarRef and list each VarRef at
/// most once. `diff_count` counts how many times the equation has been
/// structurally differentiated from its original form (0 for equations
/// that came from a model file).
struct Equation {
    std::string id;
    std::vector<Occurrence> occurrences;
    int diff_count = 0;

    auto operator<=>(const Equation&) const = default;

    /// Look up the occurrence of `v`, if any.
    const Occurrence* find(const VarRef& v) const;

    /// Sort occurrences and merge duplicates (linear_ti merges by AND:
    /// an appearance is only linear-TI if every merged source was).
    void normalize();

    /// Equation as seen from an enclosing scope: id and all occurrence
    /// bases are prefixed with "inst.".
    Equation qualified(const std::string& instance) const;
};

/// A named component slot inside a model definition.
struct ComponentInstance {
    std::string instance_name;
    std::string def_name;
};

enum class ModelKind { Nlae, Dae };

std::string to_string(ModelKind kind);

/// One model definition. Equations may reference the definition's own
/// variables and, via "instance.var", declared variables of *direct*
/// components. Deeper references and references to parent scopes are
/// rejected at validation time.
struct ModelDef {
    std::string name;
    std::vector<std::string> variables;
    std::vector<ComponentInstance> components;
    std::vector<Equation> equations;
    ModelKind kind = ModelKind::Nlae;

    bool is_primary() const { return components.empty(); }
    const ComponentInstance* find_component(const std::string& instance) const;
};

/// A set of model definitions plus the name of the root definition.
/// `meta_json` preserves the optional "meta" object of a model file
/// verbatim (the generator records its parameters there).
struct ModelRegistry {
    std::vector<ModelDef> defs;
    std::string root;
    std::string meta_json;

    bool has(const std::string& name) const;
    const ModelDef& def(const std::string& name) const; // throws ModelError
    const ModelDef& root_def() const;
};

/// The flattened form of a model: every instance tree expanded, names
/// qualified by instance path ("a.b.x").
struct FlatModel {
    std::set<std::string> variables;
    std::vector<Equation> equations;
};

/// Parse a model file. Throws ParseError on malformed text and ModelError
/// on schema/consistency violations (see validate()).
ModelRegistry parse_model(const std::string& text);

/// Canonical serialization; parse_model(serialize_model(r)) reproduces a
/// structurally identical registry, and equal registries serialize to
/// identical bytes.
std::string serialize_model(const ModelRegistry& reg);

/// Check registry consistency: identifier syntax, unique names, resolvable
/// component definitions, acyclic instantiation, resolvable variable
/// references, per-equation occurrence uniqueness. Throws ModelError.
void validate(const ModelRegistry& reg);

/// Expand the instance tree of `def` into a flat model. Variables and
/// equations of an instance are qualified by its instance path; top-level
/// names stay unqualified.
FlatModel flatten(const ModelDef& def, const ModelRegistry& reg);

/// Nesting depth: 0 for a primary model (no components), otherwise
/// 1 + max over component definitions.
int level_of(const ModelDef& def, const ModelRegistry& reg);

/// Variable-set difference that follows derivatives: removes from `xs`
/// every reference whose base matches some y in `ys` with order >= y's
/// order. Removing {T,1} purges T', T'', ... but keeps T itself.
std::set<VarRef> ominus(const std::set<VarRef>& xs, const std::set<VarRef>& ys);

} // namespace hsa
