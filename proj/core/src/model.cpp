#include "hsa/model.hpp"
#include "hsa/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hsa {

using nlohmann::json;

// ============================================================ VarRef

std::string VarRef::display() const {
    std::string s = base;
    s.append(static_cast<size_t>(order), '\'');
    return s;
}

VarRef VarRef::qualified(const std::string& instance) const {
    return VarRef{instance + "." + base, order};
}

// ============================================================ Equation

const Occurrence* Equation::find(const VarRef& v) const {
    auto it = std::lower_bound(occurrences.begin(), occurrences.end(), v,
                               [](const Occurrence& o, const VarRef& w) { return o.var < w; });
    if (it != occurrences.end() && it->var == v) return &*it;
    return nullptr;
}

void Equation::normalize() {
    std::sort(occurrences.begin(), occurrences.end(),
              [](const Occurrence& a, const Occurrence& b) { return a.var < b.var; });
    std::vector<Occurrence> merged;
    for (const Occurrence& o : occurrences) {
        if (!merged.empty() && merged.back().var == o.var)
            merged.back().linear_ti = merged.back().linear_ti && o.linear_ti;
        else
            merged.push_back(o);
    }
    occurrences = std::move(merged);
}

Equation Equation::qualified(const std::string& instance) const {
    Equation q = *this;
    q.id = instance + "." + id;
    for (Occurrence& o : q.occurrences) o.var = o.var.qualified(instance);
    return q;
}

// ============================================================ ModelDef / registry

std::string to_string(ModelKind kind) {
    return kind == ModelKind::Nlae ? "nlae" : "dae";
}

const ComponentInstance* ModelDef::find_component(const std::string& instance) const {
    for (const ComponentInstance& c : components)
        if (c.instance_name == instance) return &c;
    return nullptr;
}

bool ModelRegistry::has(const std::string& name) const {
    for (const ModelDef& d : defs)
        if (d.name == name) return true;
    return false;
}

const ModelDef& ModelRegistry::def(const std::string& name) const {
    for (const ModelDef& d : defs)
        if (d.name == name) return d;
    throw ModelError("unknown model definition '" + name + "'");
}

const ModelDef& ModelRegistry::root_def() const {
    return def(root);
}

// ============================================================ validation

namespace {

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

void require_identifier(const std::string& s, const std::string& role) {
    if (!valid_identifier(s))
        throw ModelError("invalid " + role + " '" + s +
                         "': expected [A-Za-z_][A-Za-z0-9_]*");
}

// Depth-first cycle check over component definitions.
void check_acyclic(const ModelRegistry& reg, const std::string& name,
                   std::map<std::string, int>& state, std::vector<std::string>& stack) {
    // state: 0 = unseen, 1 = in progress, 2 = done
    int& st = state[name];
    if (st == 2) return;
    if (st == 1) {
        std::string chain;
        for (const std::string& s : stack) chain += s + " -> ";
        throw ModelError("cyclic instantiation: " + chain + name);
    }
    st = 1;
    stack.push_back(name);
    for (const ComponentInstance& c : reg.def(name).components)
        check_acyclic(reg, c.def_name, state, stack);
    stack.pop_back();
    st = 2;
}

} // namespace

void validate(const ModelRegistry& reg) {
    if (reg.defs.empty()) throw ModelError("registry has no definitions");

    std::unordered_set<std::string> def_names;
    for (const ModelDef& d : reg.defs) {
        require_identifier(d.name, "definition name");
        if (!def_names.insert(d.name).second)
            throw ModelError("duplicate definition '" + d.name + "'");
    }
    if (!reg.has(reg.root)) throw ModelError("root definition '" + reg.root + "' not found");

    for (const ModelDef& d : reg.defs) {
        std::unordered_set<std::string> vars;
        for (const std::string& v : d.variables) {
            require_identifier(v, "variable name");
            if (!vars.insert(v).second)
                throw ModelError("duplicate variable '" + v + "' in '" + d.name + "'");
        }
        std::unordered_set<std::string> instances;
        for (const ComponentInstance& c : d.components) {
            require_identifier(c.instance_name, "instance name");
            if (!instances.insert(c.instance_name).second)
                throw ModelError("duplicate instance '" + c.instance_name + "' in '" + d.name + "'");
            if (!reg.has(c.def_name))
                throw ModelError("component '" + c.instance_name + "' in '" + d.name +
                                 "' references undefined model '" + c.def_name + "'");
        }

        std::unordered_set<std::string> eq_ids;
        for (const Equation& e : d.equations) {
            require_identifier(e.id, "equation id");
            if (!eq_ids.insert(e.id).second)
                throw ModelError("duplicate equation id '" + e.id + "' in '" + d.name + "'");
            std::set<VarRef> seen;
            for (const Occurrence& o : e.occurrences) {
                if (o.var.order < 0 || o.var.order > kMaxParsedOrder)
                    throw ModelError("derivative order " + std::to_string(o.var.order) +
                                     " out of range in equation '" + e.id + "'");
                if (!seen.insert(o.var).second)
                    throw ModelError("equation '" + e.id + "' in '" + d.name +
                                     "' lists '" + o.var.display() + "' twice");
                const std::string& ref = o.var.base;
                auto dot = ref.find('.');
                if (dot == std::string::npos) {
                    if (!vars.count(ref))
                        throw ModelError("equation '" + e.id + "' in '" + d.name +
                                         "' references undeclared variable '" + ref + "'");
                } else {
                    std::string inst = ref.substr(0, dot);
                    std::string rest = ref.substr(dot + 1);
                    if (rest.find('.') != std::string::npos)
                        throw ModelError("equation '" + e.id + "' in '" + d.name +
                                         "' references '" + ref +
                                         "': only direct-component variables may be referenced");
                    const ComponentInstance* ci = d.find_component(inst);
                    if (!ci)
                        throw ModelError("equation '" + e.id + "' in '" + d.name +
                                         "' references unknown instance '" + inst + "'");
                    const ModelDef& cd = reg.def(ci->def_name);
                    if (std::find(cd.variables.begin(), cd.variables.end(), rest) ==
                        cd.variables.end())
                        throw ModelError("equation '" + e.id + "' in '" + d.name +
                                         "' references '" + ref + "' but '" + ci->def_name +
                                         "' declares no variable '" + rest + "'");
                }
            }
        }
    }

    std::map<std::string, int> state;
    std::vector<std::string> stack;
    check_acyclic(reg, reg.root, state, stack);
    for (const ModelDef& d : reg.defs) check_acyclic(reg, d.name, state, stack);
}

// ============================================================ JSON I/O

ModelRegistry parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), static_cast<long>(e.byte));
    }

    try {
        if (!j.is_object()) throw ParseError("model file must be a JSON object");
        ModelRegistry reg;
        if (!j.contains("defs") || !j["defs"].is_array())
            throw ParseError("missing \"defs\" array");
        for (const json& jd : j["defs"]) {
            ModelDef d;
            d.name = jd.at("name").get<std::string>();
            std::string kind = jd.value("kind", "nlae");
            if (kind == "nlae")
                d.kind = ModelKind::Nlae;
            else if (kind == "dae")
                d.kind = ModelKind::Dae;
            else
                throw ParseError("definition '" + d.name + "': unknown kind '" + kind + "'");
            if (jd.contains("variables"))
                for (const json& v : jd.at("variables")) d.variables.push_back(v.get<std::string>());
            if (jd.contains("components"))
                for (const json& c : jd.at("components"))
                    d.components.push_back({c.at("instance").get<std::string>(),
                                            c.at("def").get<std::string>()});
            if (jd.contains("equations"))
                for (const json& je : jd.at("equations")) {
                    Equation e;
                    e.id = je.at("id").get<std::string>();
                    for (const json& jo : je.value("occ", json::array())) {
                        Occurrence o;
                        o.var.base = jo.at("var").get<std::string>();
                        o.var.order = jo.value("order", 0);
                        o.linear_ti = jo.value("linear_ti", false);
                        e.occurrences.push_back(o);
                    }
                    // Duplicate listings are a schema violation; detect before
                    // normalize() would silently merge them.
                    std::set<VarRef> seen;
                    for (const Occurrence& o : e.occurrences)
                        if (!seen.insert(o.var).second)
                            throw ModelError("equation '" + e.id + "' in '" + d.name +
                                             "' lists '" + o.var.display() + "' twice");
                    e.normalize();
                    d.equations.push_back(std::move(e));
                }
            reg.defs.push_back(std::move(d));
        }
        if (!j.contains("root")) throw ParseError("missing \"root\"");
        reg.root = j["root"].get<std::string>();
        if (j.contains("meta")) reg.meta_json = j["meta"].dump();
        validate(reg);
        return reg;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

std::string serialize_model(const ModelRegistry& reg) {
    json j;
    j["root"] = reg.root;
    json defs = json::array();
    for (const ModelDef& d : reg.defs) {
        json jd;
        jd["name"] = d.name;
        jd["kind"] = to_string(d.kind);
        jd["variables"] = d.variables;
        json comps = json::array();
        for (const ComponentInstance& c : d.components)
            comps.push_back({{"instance", c.instance_name}, {"def", c.def_name}});
        jd["components"] = std::move(comps);
        json eqs = json::array();
        for (const Equation& e : d.equations) {
            json je;
            je["id"] = e.id;
            json occ = json::array();
            for (const Occurrence& o : e.occurrences) {
                json jo;
                jo["var"] = o.var.base;
                if (o.var.order != 0) jo["order"] = o.var.order;
                if (o.linear_ti) jo["linear_ti"] = true;
                occ.push_back(std::move(jo));
            }
            je["occ"] = std::move(occ);
            eqs.push_back(std::move(je));
        }
        jd["equations"] = std::move(eqs);
        defs.push_back(std::move(jd));
    }
    j["defs"] = std::move(defs);
    if (!reg.meta_json.empty()) j["meta"] = json::parse(reg.meta_json);
    return j.dump(2) + "\n";
}

// ============================================================ flatten / level_of / ominus

namespace {

void flatten_into(const ModelDef& def, const ModelRegistry& reg, const std::string& prefix,
                  FlatModel& out) {
    for (const std::string& v : def.variables) out.variables.insert(prefix + v);
    for (const Equation& e : def.equations) {
        Equation q = e;
        q.id = prefix + q.id;
        for (Occurrence& o : q.occurrences) o.var.base = prefix + o.var.base;
        out.equations.push_back(std::move(q));
    }
    for (const ComponentInstance& c : def.components)
        flatten_into(reg.def(c.def_name), reg, prefix + c.instance_name + ".", out);
}

} // namespace

FlatModel flatten(const ModelDef& def, const ModelRegistry& reg) {
    FlatModel flat;
    flatten_into(def, reg, "", flat);
    return flat;
}

int level_of(const ModelDef& def, const ModelRegistry& reg) {
    int level = 0;
    for (const ComponentInstance& c : def.components)
        level = std::max(level, 1 + level_of(reg.def(c.def_name), reg));
    return level;
}

std::set<VarRef> ominus(const std::set<VarRef>& xs, const std::set<VarRef>& ys) {
    // Minimum removed order per base; orders at or above it are purged.
    std::map<std::string, int> cut;
    for (const VarRef& y : ys) {
        auto [it, fresh] = cut.emplace(y.base, y.order);
        if (!fresh) it->second = std::min(it->second, y.order);
    }
    std::set<VarRef> out;
    for (const VarRef& x : xs) {
        auto it = cut.find(x.base);
        if (it != cut.end() && x.order >= it->second) continue;
        out.insert(x);
    }
    return out;
}

} // namespace hsa
