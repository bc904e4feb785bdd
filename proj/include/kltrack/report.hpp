#pragma once

#include <string>

#include <json.hpp>

#include "kltrack/comparison.hpp"
#include "kltrack/simulation.hpp"

namespace kltrack {

// Number with 4 significant digits, the text-mode convention.
std::string fmt4(double value);

// Human-readable reports.
std::string render_fit_text(const FittedModel& model);
std::string render_comparison_text(const ComparisonResult& result);
std::string render_simulation_text(const SimulationReport& report);
std::string render_nested_fit_text(const NestedFitReport& report);

// Machine-readable reports; same numbers at full precision.
nlohmann::json fit_to_json(const FittedModel& model);
nlohmann::json comparison_to_json(const ComparisonResult& result);
nlohmann::json simulation_to_json(const SimulationReport& report);
nlohmann::json nested_fit_to_json(const NestedFitReport& report);

}  // namespace kltrack
