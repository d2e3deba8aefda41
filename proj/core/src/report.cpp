#include "hsa/report.hpp"
#include "hsa/errors.hpp"

#include <json.hpp>

#include <sstream>

namespace hsa {

using nlohmann::json;

std::string report_to_json(const AnalysisReport& r) {
    json j;
    j["model"] = r.model;
    j["mode"] = r.mode;
    j["kind"] = r.kind;
    j["singular"] = r.singular;
    j["over_equations"] = r.over_equations;
    j["over_variables"] = r.over_variables;
    j["exposed_variables"] = r.exposed_variables;
    j["under"] = {{"variables", r.under_variables}, {"equations", r.under_equations}};
    j["well_count"] = r.well_count;
    j["dof"] = r.dof;
    json sugg = json::array();
    for (const InitSuggestion& s : r.init_suggestions)
        sugg.push_back({{"exposed", s.exposed}, {"candidates", s.candidates}});
    j["init_suggestions"] = std::move(sugg);
    json viol = json::array();
    for (const ComponentViolation& v : r.component_violations)
        viol.push_back(
            {{"definition", v.definition}, {"status", v.status}, {"equations", v.equations}});
    j["component_violations"] = std::move(viol);
    if (r.deficiency)
        j["deficiency"] = {{"kind", r.deficiency->kind},
                           {"equations", r.deficiency->equations},
                           {"message", r.deficiency->message}};
    else
        j["deficiency"] = nullptr;
    json loc = json::array();
    for (const LocalizedOver& l : r.localized_over)
        loc.push_back({{"instance", l.instance},
                       {"definition", l.definition},
                       {"equations", l.equations}});
    j["localized_over"] = std::move(loc);
    j["timings_ms"] = r.timings_ms;
    return j.dump(2) + "\n";
}

AnalysisReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), static_cast<long>(e.byte));
    }
    try {
        AnalysisReport r;
        r.model = j.at("model").get<std::string>();
        r.mode = j.at("mode").get<std::string>();
        r.kind = j.value("kind", "nlae");
        r.singular = j.at("singular").get<bool>();
        r.over_equations = j.at("over_equations").get<std::vector<std::string>>();
        r.over_variables = j.value("over_variables", std::vector<std::string>{});
        r.exposed_variables = j.at("exposed_variables").get<std::vector<std::string>>();
        r.under_variables = j.at("under").at("variables").get<std::vector<std::string>>();
        r.under_equations = j.at("under").at("equations").get<std::vector<std::string>>();
        r.well_count = j.at("well_count").get<int>();
        r.dof = j.value("dof", 0);
        for (const json& s : j.value("init_suggestions", json::array()))
            r.init_suggestions.push_back({s.at("exposed").get<std::string>(),
                                          s.at("candidates").get<std::vector<std::string>>()});
        for (const json& v : j.value("component_violations", json::array()))
            r.component_violations.push_back({v.at("definition").get<std::string>(),
                                              v.at("status").get<std::string>(),
                                              v.at("equations").get<std::vector<std::string>>()});
        if (j.contains("deficiency") && !j["deficiency"].is_null())
            r.deficiency = DeficiencyReport{
                j["deficiency"].at("kind").get<std::string>(),
                j["deficiency"].at("equations").get<std::vector<std::string>>(),
                j["deficiency"].at("message").get<std::string>()};
        for (const json& l : j.value("localized_over", json::array()))
            r.localized_over.push_back({l.at("instance").get<std::string>(),
                                        l.at("definition").get<std::string>(),
                                        l.at("equations").get<std::vector<std::string>>()});
        if (j.contains("timings_ms"))
            r.timings_ms = j["timings_ms"].get<std::map<std::string, double>>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
}

namespace {

void print_list(std::ostringstream& out, const std::string& label,
                const std::vector<std::string>& items) {
    out << "  " << label << " (" << items.size() << ")";
    if (items.empty()) {
        out << ": none\n";
        return;
    }
    out << ":";
    for (const std::string& s : items) out << " " << s;
    out << "\n";
}

} // namespace

std::string report_to_text(const AnalysisReport& r) {
    std::ostringstream out;
    out << "model: " << r.model << " [" << r.kind << ", " << r.mode << "]\n";
    out << "result: " << (r.singular ? "STRUCTURALLY SINGULAR" : "well-posed") << "\n";
    if (r.deficiency) {
        out << "  deficiency (" << r.deficiency->kind << "): " << r.deficiency->message << "\n";
        print_list(out, "offending equations", r.deficiency->equations);
    }
    print_list(out, "over-constrained equations", r.over_equations);
    print_list(out, "over-constrained variables", r.over_variables);
    print_list(out, "under-constrained variables", r.under_variables);
    print_list(out, "under-constrained equations", r.under_equations);
    print_list(out, "exposed variables", r.exposed_variables);
    out << "  well-constrained nodes: " << r.well_count << "\n";
    out << "  degrees of freedom: " << r.dof << "\n";
    if (!r.init_suggestions.empty()) {
        out << "initialization (select one variable per line):\n";
        for (const InitSuggestion& s : r.init_suggestions) {
            out << "  " << s.exposed << ":";
            for (const std::string& c : s.candidates) out << " " << c;
            out << "\n";
        }
    }
    for (const ComponentViolation& v : r.component_violations) {
        out << "component violation: " << v.definition << " is " << v.status << ";";
        for (const std::string& e : v.equations) out << " " << e;
        out << "\n";
    }
    for (const LocalizedOver& l : r.localized_over) {
        out << "over-constraint localized to " << l.instance << " (" << l.definition << "):";
        for (const std::string& e : l.equations) out << " " << e;
        out << "\n";
    }
    if (!r.timings_ms.empty()) {
        out << "timings:";
        for (const auto& [k, v] : r.timings_ms) out << " " << k << "=" << v << "ms";
        out << "\n";
    }
    return out.str();
}

} // namespace hsa
