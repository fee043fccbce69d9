#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "corrlss/clt_engine.hpp"
#include "corrlss/contour.hpp"
#include "corrlss/dgp_sim.hpp"
#include "corrlss/lss_test.hpp"

namespace corrlss {

using json = nlohmann::json;

void to_json(json& j, const ContourSpec& contour);
void from_json(const json& j, ContourSpec& contour);

void to_json(json& j, const MomentParams& params);
void from_json(const json& j, MomentParams& params);

void to_json(json& j, const CltMoments& moments);
void to_json(json& j, const TestReport& report);

void to_json(json& j, const DgpSpec& spec);
void from_json(const json& j, DgpSpec& spec);

void to_json(json& j, const SimulationCell& cell);
void to_json(json& j, const SimulationReport& report);

std::string_view to_string(MomentSource source);
MomentSource parse_moment_source(std::string_view text);
std::string_view to_string(VariableCase var_case);
VariableCase parse_variable_case(std::string_view text);

/// Rejection rates as a table: one row per n, one column per c = p/n, or per d when every
/// cell varies a heterogeneous share or spike. Missing cells are left empty.
std::string simulation_table_csv(const SimulationReport& report);

}  // namespace corrlss
