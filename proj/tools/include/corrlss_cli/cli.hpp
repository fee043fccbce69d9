#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrlss/matrix_core.hpp"

namespace corrlss::cli {

enum class Command { Test, Simulate, Mp, Clt };
enum class OutputFormat { Json, Csv, Text };

struct RunConfig {
  Command command = Command::Test;

  // test
  std::optional<std::string> input_path;
  bool transpose = false;
  std::string test_kind = "independence";
  std::string f = "square";
  double alpha = 0.05;
  std::string source = "closed-form";

  // simulate
  std::string dgp = "indep-half-gamma";
  std::vector<long> n_values;
  std::vector<double> c_values;       // p = round(c·n)
  std::vector<double> share_values;   // heterogeneous share, or spike value for the spike DGP
  int factors = 2;
  std::uint64_t seed = 20240601;
  std::size_t K = 1000;
  unsigned threads = 0;

  // mp / clt
  double c = 1.0;
  std::vector<int> moments;
  std::vector<double> density_points;
  std::vector<double> stieltjes_points;  // flattened (re, im) pairs
  double kappa = 3.0;
  double psi_re = 1.0;
  double psi_im = 0.0;
  std::string var_case = "real";

  OutputFormat output = OutputFormat::Json;

  /// Throws Error(InvalidArgument) when fields are inconsistent.
  void validate() const;
};

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// Comma-separated numbers, one variable per line (per column with `transpose`).
/// A first line containing any non-numeric cell is treated as a header and skipped.
DataMatrix ingest_csv(const std::string& path, bool transpose);

/// Executes the command; returns 0 on success, 2 on input errors, 3 on numerical failures.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments (argv[0] is the program name) and runs them.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace corrlss::cli
