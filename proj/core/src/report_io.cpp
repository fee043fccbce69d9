#include "corrlss/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "corrlss/error.hpp"

namespace corrlss {

std::string_view to_string(MomentSource source) {
  return source == MomentSource::ClosedForm ? "closed-form" : "plug-in";
}

MomentSource parse_moment_source(std::string_view text) {
  if (text == "closed-form") return MomentSource::ClosedForm;
  if (text == "plug-in") return MomentSource::PlugIn;
  throw Error(Errc::InvalidArgument, "unknown moment source '" + std::string(text) + "'");
}

std::string_view to_string(VariableCase var_case) {
  return var_case == VariableCase::Real ? "real" : "complex";
}

VariableCase parse_variable_case(std::string_view text) {
  if (text == "real") return VariableCase::Real;
  if (text == "complex") return VariableCase::Complex;
  throw Error(Errc::InvalidArgument, "unknown variable case '" + std::string(text) + "'");
}

void to_json(json& j, const ContourSpec& contour) {
  j = json{{"x_left", contour.x_left},
           {"x_right", contour.x_right},
           {"height", contour.height},
           {"nodes_per_side", contour.nodes_per_side},
           {"refinement_tolerance", contour.refinement_tolerance}};
}

void from_json(const json& j, ContourSpec& contour) {
  j.at("x_left").get_to(contour.x_left);
  j.at("x_right").get_to(contour.x_right);
  j.at("height").get_to(contour.height);
  j.at("nodes_per_side").get_to(contour.nodes_per_side);
  j.at("refinement_tolerance").get_to(contour.refinement_tolerance);
}

void to_json(json& j, const MomentParams& params) {
  j = json{{"c", params.c},
           {"kappa", params.kappa},
           {"psi", {params.psi.real(), params.psi.imag()}},
           {"case", to_string(params.var_case)}};
}

void from_json(const json& j, MomentParams& params) {
  j.at("c").get_to(params.c);
  j.at("kappa").get_to(params.kappa);
  const auto& psi = j.at("psi");
  params.psi = cplx(psi.at(0).get<double>(), psi.at(1).get<double>());
  params.var_case = parse_variable_case(j.at("case").get<std::string>());
}

void to_json(json& j, const CltMoments& moments) {
  j = json{{"mean", moments.mean},
           {"variance", moments.variance},
           {"mean_imag_residue", moments.mean_imag},
           {"variance_imag_residue", moments.variance_imag},
           {"params", moments.params},
           {"source", to_string(moments.source)},
           {"contour", moments.contour},
           {"inner_contour", moments.inner_contour}};
}

void to_json(json& j, const TestReport& report) {
  j = json{{"test_kind", to_string(report.kind)},
           {"function", report.function},
           {"alpha", report.alpha},
           {"input_p", report.input_p},
           {"input_n", report.input_n},
           {"p", report.p},
           {"n", report.n},
           {"statistic", report.statistic},
           {"z_score", report.z_score},
           {"p_value", report.p_value},
           {"reject", report.reject},
           {"kappa_hat", report.moments.params.kappa},
           {"moments", report.moments}};
}

void to_json(json& j, const DgpSpec& spec) {
  j = json{{"kind", to_string(spec.kind)}, {"p", spec.p},         {"n", spec.n},
           {"seed", spec.seed},            {"factors", spec.factors},
           {"share", spec.share},          {"spike", spec.spike}};
}

void from_json(const json& j, DgpSpec& spec) {
  spec.kind = parse_dgp_kind(j.at("kind").get<std::string>());
  j.at("p").get_to(spec.p);
  j.at("n").get_to(spec.n);
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.factors = j.value("factors", 2);
  spec.share = j.value("share", 0.1);
  spec.spike = j.value("spike", 0.5);
}

void to_json(json& j, const SimulationCell& cell) {
  j = json{{"spec", cell.spec},
           {"c", static_cast<double>(cell.spec.p) / static_cast<double>(cell.spec.n)},
           {"rejections", cell.rejections},
           {"replications", cell.replications},
           {"rate", cell.rate},
           {"standard_error", cell.standard_error},
           {"completed", cell.completed}};
  if (!cell.completed) j["diagnostic"] = cell.diagnostic;
}

void to_json(json& j, const SimulationReport& report) {
  j = json{{"test_kind", to_string(report.test)},
           {"function", report.function},
           {"replications", report.replications},
           {"alpha", report.alpha},
           {"base_seed", report.base_seed},
           {"seed_rule", report.seed_rule},
           {"cells", report.cells}};
}

namespace {

bool varies_share(DgpKind kind) {
  return kind == DgpKind::FactorHeteroLoading || kind == DgpKind::FactorHeteroFactor ||
         kind == DgpKind::AlphaHetero || kind == DgpKind::DependentSpike;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::string simulation_table_csv(const SimulationReport& report) {
  const bool by_share = !report.cells.empty() &&
                        std::all_of(report.cells.begin(), report.cells.end(),
                                    [](const SimulationCell& c) { return varies_share(c.spec.kind); });
  auto column_of = [&](const SimulationCell& cell) {
    if (!by_share) return static_cast<double>(cell.spec.p) / static_cast<double>(cell.spec.n);
    return cell.spec.kind == DgpKind::DependentSpike ? cell.spec.spike : cell.spec.share;
  };

  std::set<double> columns;
  std::map<Index, std::map<double, const SimulationCell*>> rows;
  for (const SimulationCell& cell : report.cells) {
    const double col = column_of(cell);
    columns.insert(col);
    rows[cell.spec.n][col] = &cell;
  }

  std::ostringstream out;
  out << (by_share ? "n\\d" : "n\\c");
  for (double col : columns) out << ',' << format_number(col);
  out << '\n';
  for (const auto& [n, cells] : rows) {
    out << n;
    for (double col : columns) {
      out << ',';
      auto it = cells.find(col);
      if (it != cells.end() && it->second->completed) out << format_number(it->second->rate);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace corrlss
