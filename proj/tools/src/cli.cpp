#include "corrlss_cli/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>

#include <CLI11.hpp>

#include "corrlss/clt_engine.hpp"
#include "corrlss/dgp_sim.hpp"
#include "corrlss/error.hpp"
#include "corrlss/lss_test.hpp"
#include "corrlss/mp_law.hpp"
#include "corrlss/report_io.hpp"

namespace corrlss::cli {
namespace {

using nlohmann::json;

constexpr std::string_view kCommandNames[] = {"test", "simulate", "mp", "clt"};
constexpr std::string_view kOutputNames[] = {"json", "csv", "text"};

std::string_view command_name(Command c) { return kCommandNames[static_cast<int>(c)]; }
std::string_view output_name(OutputFormat o) { return kOutputNames[static_cast<int>(o)]; }

template <class Enum, std::size_t N>
Enum parse_name(std::string_view text, const std::string_view (&names)[N], const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<Enum>(i);
  }
  throw Error(Errc::InvalidArgument, std::string("unknown ") + what + " '" + std::string(text) + "'");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view cell, double& value) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (std::size_t pos; (pos = line.find(',', start)) != std::string_view::npos; start = pos + 1) {
    cells.push_back(line.substr(start, pos - start));
  }
  cells.push_back(line.substr(start));
  return cells;
}

void print_test(const RunConfig& config, const TestReport& report, std::ostream& out) {
  switch (config.output) {
    case OutputFormat::Json:
      out << json{{"command", "test"}, {"config", config_to_json(config)}, {"report", report}}.dump(2)
          << '\n';
      break;
    case OutputFormat::Csv:
      out << "test_kind,function,p,n,statistic,z_score,p_value,reject,kappa_hat,mean,variance\n"
          << to_string(report.kind) << ',' << report.function << ',' << report.p << ','
          << report.n << ',' << fmt(report.statistic) << ',' << fmt(report.z_score) << ','
          << fmt(report.p_value) << ',' << (report.reject ? "true" : "false") << ','
          << fmt(report.moments.params.kappa) << ',' << fmt(report.moments.mean) << ','
          << fmt(report.moments.variance) << '\n';
      break;
    case OutputFormat::Text:
      out << "test       " << to_string(report.kind) << " (f = " << report.function << ")\n"
          << "data       p = " << report.input_p << ", n = " << report.input_n << "\n"
          << "spectrum   p = " << report.p << ", n = " << report.n << "\n"
          << "statistic  " << fmt(report.statistic) << "\n"
          << "mean       " << fmt(report.moments.mean) << "\n"
          << "variance   " << fmt(report.moments.variance) << "\n"
          << "kappa_hat  " << fmt(report.moments.params.kappa) << "\n"
          << "z          " << fmt(report.z_score) << "\n"
          << "p-value    " << fmt(report.p_value) << "\n"
          << "decision   " << (report.reject ? "reject" : "do not reject") << " at alpha = "
          << fmt(report.alpha) << "\n";
      break;
  }
}

int run_test(const RunConfig& config, std::ostream& out) {
  const DataMatrix data = ingest_csv(*config.input_path, config.transpose);
  TestOptions options{TestFunction::parse(config.f), config.alpha,
                      parse_moment_source(config.source)};
  const TestReport report = TestEngine(parse_test_kind(config.test_kind), options).run(data);
  print_test(config, report, out);
  return 0;
}

int run_simulate(const RunConfig& config, std::ostream& out) {
  ExperimentConfig experiment;
  experiment.test = parse_test_kind(config.test_kind);
  experiment.f = TestFunction::parse(config.f);
  experiment.replications = config.K;
  experiment.alpha = config.alpha;
  experiment.base_seed = config.seed;
  experiment.threads = config.threads;

  const DgpKind kind = parse_dgp_kind(config.dgp);
  const std::vector<double> cs = config.c_values.empty() ? std::vector<double>{1.0} : config.c_values;
  const std::vector<double> shares =
      config.share_values.empty()
          ? std::vector<double>{kind == DgpKind::DependentSpike ? 0.5 : 0.1}
          : config.share_values;
  for (long n : config.n_values) {
    for (double c : cs) {
      for (double d : shares) {
        DgpSpec spec;
        spec.kind = kind;
        spec.n = n;
        spec.p = static_cast<Index>(std::lround(c * static_cast<double>(n)));
        spec.factors = config.factors;
        if (kind == DgpKind::DependentSpike) {
          spec.spike = d;
        } else {
          spec.share = d;
        }
        experiment.grid.push_back(spec);
      }
    }
  }
  const SimulationReport report = run_experiment(experiment);

  switch (config.output) {
    case OutputFormat::Json:
      out << json{{"command", "simulate"}, {"config", config_to_json(config)}, {"report", report}}
                 .dump(2)
          << '\n';
      break;
    case OutputFormat::Csv:
      out << simulation_table_csv(report);
      break;
    case OutputFormat::Text:
      for (const SimulationCell& cell : report.cells) {
        out << to_string(cell.spec.kind) << " n=" << cell.spec.n << " p=" << cell.spec.p;
        if (kind == DgpKind::DependentSpike) out << " d=" << fmt(cell.spec.spike);
        if (kind == DgpKind::FactorHeteroLoading || kind == DgpKind::FactorHeteroFactor ||
            kind == DgpKind::AlphaHetero) {
          out << " d=" << fmt(cell.spec.share);
        }
        if (cell.completed) {
          out << " rate=" << fmt(cell.rate) << " se=" << fmt(cell.standard_error) << '\n';
        } else {
          out << " failed: " << cell.diagnostic << '\n';
        }
      }
      break;
  }
  for (const SimulationCell& cell : report.cells) {
    if (!cell.completed) return 3;
  }
  return 0;
}

int run_mp(const RunConfig& config, std::ostream& out) {
  const MpModel model(config.c);
  json moments = json::array();
  for (int k : config.moments) {
    std::vector<double> coeffs(static_cast<std::size_t>(k) + 1, 0.0);
    coeffs.back() = 1.0;
    moments.push_back({{"k", k}, {"value", mp_integral(model, TestFunction::polynomial(coeffs))}});
  }
  json density = json::array();
  for (double x : config.density_points) {
    density.push_back({{"x", x}, {"value", mp_density(model, x)}});
  }
  json transforms = json::array();
  for (std::size_t i = 0; i + 1 < config.stieltjes_points.size(); i += 2) {
    const StieltjesPair s =
        stieltjes(model, cplx(config.stieltjes_points[i], config.stieltjes_points[i + 1]));
    auto pair = [](cplx v) { return json{v.real(), v.imag()}; };
    transforms.push_back({{"z", pair(s.z)},
                          {"m", pair(s.m)},
                          {"m_under", pair(s.m_under)},
                          {"m_prime", pair(s.m_prime)},
                          {"m_under_prime", pair(s.m_under_prime)}});
  }

  switch (config.output) {
    case OutputFormat::Json:
      out << json{{"command", "mp"},
                  {"config", config_to_json(config)},
                  {"c", model.c()},
                  {"lower_edge", model.lower_edge()},
                  {"upper_edge", model.upper_edge()},
                  {"point_mass_at_zero", model.point_mass_at_zero()},
                  {"moments", moments},
                  {"density", density},
                  {"stieltjes", transforms}}
                 .dump(2)
          << '\n';
      break;
    case OutputFormat::Csv:
      out << "quantity,argument,value\n";
      for (const auto& m : moments) out << "moment," << m["k"] << ',' << fmt(m["value"]) << '\n';
      for (const auto& d : density) {
        out << "density," << fmt(d["x"]) << ',' << fmt(d["value"]) << '\n';
      }
      for (const auto& s : transforms) {
        out << "m," << fmt(s["z"][0]) << (s["z"][1].get<double>() < 0 ? "" : "+")
            << fmt(s["z"][1]) << "i," << fmt(s["m"][0]) << (s["m"][1].get<double>() < 0 ? "" : "+")
            << fmt(s["m"][1]) << "i\n";
      }
      break;
    case OutputFormat::Text:
      out << "support  [" << fmt(model.lower_edge()) << ", " << fmt(model.upper_edge()) << "]\n";
      if (model.point_mass_at_zero() > 0.0) {
        out << "atom     " << fmt(model.point_mass_at_zero()) << " at 0\n";
      }
      for (const auto& m : moments) out << "moment " << m["k"] << ": " << fmt(m["value"]) << '\n';
      for (const auto& d : density) {
        out << "density(" << fmt(d["x"]) << "): " << fmt(d["value"]) << '\n';
      }
      for (const auto& s : transforms) {
        out << "m(" << fmt(s["z"][0]) << ", " << fmt(s["z"][1]) << "): " << fmt(s["m"][0]) << ", "
            << fmt(s["m"][1]) << '\n';
      }
      break;
  }
  return 0;
}

int run_clt(const RunConfig& config, std::ostream& out) {
  MomentParams params;
  params.c = config.c;
  params.kappa = config.kappa;
  params.psi = cplx(config.psi_re, config.psi_im);
  params.var_case = parse_variable_case(config.var_case);
  params.validate();
  const TestFunction f = TestFunction::parse(config.f);
  const CltMoments moments =
      compute_moments(f, StieltjesSource::closed_form(MpModel(config.c)), params);

  switch (config.output) {
    case OutputFormat::Json:
      out << json{{"command", "clt"}, {"config", config_to_json(config)}, {"moments", moments}}
                 .dump(2)
          << '\n';
      break;
    case OutputFormat::Csv:
      out << "function,c,kappa,case,mean,variance\n"
          << f.name() << ',' << fmt(config.c) << ',' << fmt(config.kappa) << ','
          << config.var_case << ',' << fmt(moments.mean) << ',' << fmt(moments.variance) << '\n';
      break;
    case OutputFormat::Text:
      out << "mean      " << fmt(moments.mean) << "\n"
          << "variance  " << fmt(moments.variance) << "\n";
      break;
  }
  return 0;
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1)");
  switch (command) {
    case Command::Test:
      if (!input_path) throw Error(Errc::InvalidArgument, "test requires --input");
      break;
    case Command::Simulate:
      if (n_values.empty()) throw Error(Errc::InvalidArgument, "simulate requires --n");
      if (K < 1) throw Error(Errc::InvalidArgument, "K must be at least 1");
      break;
    case Command::Mp:
      for (int k : moments) {
        if (k < 0) throw Error(Errc::InvalidArgument, "moment order must be non-negative");
      }
      if (stieltjes_points.size() % 2 != 0) {
        throw Error(Errc::InvalidArgument, "--z takes real,imaginary pairs");
      }
      break;
    case Command::Clt:
      break;
  }
}

json config_to_json(const RunConfig& config) {
  json j{{"command", command_name(config.command)},
         {"transpose", config.transpose},
         {"test_kind", config.test_kind},
         {"f", config.f},
         {"alpha", config.alpha},
         {"source", config.source},
         {"dgp", config.dgp},
         {"n", config.n_values},
         {"c_values", config.c_values},
         {"d", config.share_values},
         {"factors", config.factors},
         {"seed", config.seed},
         {"K", config.K},
         {"threads", config.threads},
         {"c", config.c},
         {"moments", config.moments},
         {"density_points", config.density_points},
         {"stieltjes_points", config.stieltjes_points},
         {"kappa", config.kappa},
         {"psi", {config.psi_re, config.psi_im}},
         {"case", config.var_case},
         {"output", output_name(config.output)}};
  j["input_path"] = config.input_path ? json(*config.input_path) : json(nullptr);
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig config;
  config.command = parse_name<Command>(j.at("command").get<std::string>(), kCommandNames, "command");
  if (!j.at("input_path").is_null()) config.input_path = j.at("input_path").get<std::string>();
  j.at("transpose").get_to(config.transpose);
  j.at("test_kind").get_to(config.test_kind);
  j.at("f").get_to(config.f);
  j.at("alpha").get_to(config.alpha);
  j.at("source").get_to(config.source);
  j.at("dgp").get_to(config.dgp);
  j.at("n").get_to(config.n_values);
  j.at("c_values").get_to(config.c_values);
  j.at("d").get_to(config.share_values);
  j.at("factors").get_to(config.factors);
  j.at("seed").get_to(config.seed);
  j.at("K").get_to(config.K);
  j.at("threads").get_to(config.threads);
  j.at("c").get_to(config.c);
  j.at("moments").get_to(config.moments);
  j.at("density_points").get_to(config.density_points);
  j.at("stieltjes_points").get_to(config.stieltjes_points);
  j.at("kappa").get_to(config.kappa);
  config.psi_re = j.at("psi").at(0).get<double>();
  config.psi_im = j.at("psi").at(1).get<double>();
  j.at("case").get_to(config.var_case);
  config.output =
      parse_name<OutputFormat>(j.at("output").get<std::string>(), kOutputNames, "output format");
  return config;
}

DataMatrix ingest_csv(const std::string& path, bool transpose) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> values(cells.size());
    std::size_t bad = cells.size();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (!parse_double(cells[k], values[k])) {
        bad = k;
        break;
      }
    }
    const bool header = first && bad < cells.size();
    first = false;
    if (header) continue;
    if (bad < cells.size()) {
      throw Error(Errc::NonNumericCell, "line " + std::to_string(line_no) + ", column " +
                                            std::to_string(bad + 1) + ": '" +
                                            std::string(trim(cells[bad])) + "'");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw Error(Errc::RaggedRows, "line " + std::to_string(line_no) + " has " +
                                        std::to_string(values.size()) + " cells, expected " +
                                        std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
  }

  const Index r = static_cast<Index>(rows.size());
  const Index w = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Eigen::MatrixXd m(r, w);
  for (Index i = 0; i < r; ++i) {
    for (Index k = 0; k < w; ++k) m(i, k) = rows[i][k];
  }
  if (transpose) m.transposeInPlace();
  return DataMatrix(std::move(m));
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.command) {
      case Command::Test: return run_test(config, out);
      case Command::Simulate: return run_simulate(config, out);
      case Command::Mp: return run_mp(config, out);
      case Command::Clt: return run_clt(config, out);
    }
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::string output = "json";

  CLI::App app{"Tests of independence and equivalence based on linear spectral statistics of "
               "sample correlation matrices",
               "corrlss"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"json", "csv", "text"};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", output, "Report format")->check(CLI::IsMember(formats));
  };
  auto add_test_options = [&](CLI::App* sub) {
    sub->add_option("--kind", config.test_kind,
                    "independence, loadings, factors or specific")
        ->check(CLI::IsMember({"independence", "loadings", "factors", "specific"}));
    sub->add_option("--f", config.f, "Test function: square, schott, log or poly:a0,a1,...");
    sub->add_option("--alpha", config.alpha, "Significance level");
  };

  auto* test = app.add_subcommand("test", "Run a test on a CSV data file");
  test->add_option("--input", config.input_path, "CSV file, one variable per line")->required();
  test->add_flag("--transpose", config.transpose, "Variables are columns of the file");
  test->add_option("--source", config.source, "Moment source: closed-form or plug-in")
      ->check(CLI::IsMember({"closed-form", "plug-in"}));
  add_test_options(test);
  add_common(test);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo size or power of a test");
  simulate->add_option("--dgp", config.dgp, "Data generating process");
  simulate->add_option("--n", config.n_values, "Sample sizes")->delimiter(',')->required();
  simulate->add_option("--c", config.c_values, "Ratios p/n (default 1)")->delimiter(',');
  simulate->add_option("--d", config.share_values,
                       "Heterogeneous shares, or spike values for dependent-spike")
      ->delimiter(',');
  simulate->add_option("--factors", config.factors, "Number of factors r");
  simulate->add_option("--K", config.K, "Replications per cell");
  simulate->add_option("--seed", config.seed, "Base seed");
  simulate->add_option("--threads", config.threads, "Worker threads (0: all cores)");
  add_test_options(simulate);
  add_common(simulate);

  auto* mp = app.add_subcommand("mp", "Marchenko-Pastur quantities");
  mp->add_option("--c", config.c, "Ratio c = p/n")->required();
  mp->add_option("--moment", config.moments, "Moment orders k of the integral of x^k")
      ->delimiter(',');
  mp->add_option("--density", config.density_points, "Points for the density")->delimiter(',');
  mp->add_option("--z", config.stieltjes_points, "Stieltjes transform at re,im pairs")
      ->delimiter(',');
  add_common(mp);

  auto* clt = app.add_subcommand("clt", "Asymptotic mean and variance of T_n(f)");
  clt->add_option("--f", config.f, "Test function");
  clt->add_option("--c", config.c, "Ratio c = p/n")->required();
  clt->add_option("--kappa", config.kappa, "Normalized fourth moment");
  clt->add_option("--psi", config.psi_re, "Real part of psi");
  clt->add_option("--psi-im", config.psi_im, "Imaginary part of psi");
  clt->add_option("--case", config.var_case, "real or complex")
      ->check(CLI::IsMember({"real", "complex"}));
  add_common(clt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  if (test->parsed()) config.command = Command::Test;
  if (simulate->parsed()) config.command = Command::Simulate;
  if (mp->parsed()) config.command = Command::Mp;
  if (clt->parsed()) config.command = Command::Clt;
  config.output = parse_name<OutputFormat>(output, kOutputNames, "output format");
  return run(config, out, err);
}

}  // namespace corrlss::cli
