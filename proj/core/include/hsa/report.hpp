#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hsa {

/// One initialization suggestion for a dynamic model: an exposed variable
/// and the variables connected to it by a feasible path. Any one variable
/// of `candidates` may be fixed by an initial condition to absorb this
/// degree of freedom.
struct InitSuggestion {
    std::string exposed;
    std::vector<std::string> candidates; // includes `exposed`, path order
};

/// An over-constrained or deficient component: its analysis result cannot
/// be used, so the component was excluded and the model marked singular.
struct ComponentViolation {
    std::string definition;
    std::string status; // "over-constrained" | "deficient" | "derivative-cap"
    std::vector<std::string> equations; // offending equations, local names
};

/// Structural deficiency found while augmenting a dynamic model.
struct DeficiencyReport {
    std::string kind; // "redundant-constraints" | "derivative-cap"
    std::vector<std::string> equations;
    std::string message;
};

/// Per-component localization of a root-level over-constraint: the
/// component-internal equations implicated once shared variables are
/// pinned by assignment equations.
struct LocalizedOver {
    std::string instance;   // instance path in the root model
    std::string definition;
    std::vector<std::string> equations; // component-internal, local names
};

/// Everything the structural analysis found, in report form. Serializes
/// to/from JSON; equal reports serialize identically.
struct AnalysisReport {
    std::string model;
    std::string mode; // "hierarchical" | "flat"
    std::string kind; // "nlae" | "dae"
    bool singular = false;

    std::vector<std::string> over_equations;
    std::vector<std::string> over_variables;
    std::vector<std::string> exposed_variables;
    std::vector<std::string> under_variables;
    std::vector<std::string> under_equations;
    int well_count = 0;
    int dof = 0; // exposed-variable count (dynamic degrees of freedom for DAE)

    std::vector<InitSuggestion> init_suggestions;
    std::vector<ComponentViolation> component_violations;
    std::optional<DeficiencyReport> deficiency;
    std::vector<LocalizedOver> localized_over;
    std::map<std::string, double> timings_ms;
};

/// JSON serialization of the report (stable key order, 2-space indent).
std::string report_to_json(const AnalysisReport& r);

/// Inverse of report_to_json. Throws ParseError on malformed text.
AnalysisReport report_from_json(const std::string& text);

/// Human-readable rendering for terminal output.
std::string report_to_text(const AnalysisReport& r);

} // namespace hsa
