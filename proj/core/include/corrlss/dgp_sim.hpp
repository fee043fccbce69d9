#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "corrlss/lss_test.hpp"
#include "corrlss/matrix_core.hpp"
#include "corrlss/test_function.hpp"

namespace corrlss {

enum class DgpKind {
  IndepHalfGamma,        // T = I
  DependentRankOne,      // T = I + u vᵀ/√n
  DependentSpike,        // T = I + d eᵀ + e dᵀ, d = (spike, 0, …, 0)
  FactorCommonLoading,   // λ_i = λ, AR(1) factors
  FactorHeteroLoading,   // a share of rows gets its own loading
  FactorConstantFactor,  // F_t = F
  FactorHeteroFactor,    // a share of time points gets its own factor
  AlphaCommon,           // X_it = α + t/n + ε_it
  AlphaHetero,           // a share of rows gets its own α_i
};

std::string_view to_string(DgpKind kind);
DgpKind parse_dgp_kind(std::string_view text);

struct DgpSpec {
  DgpKind kind = DgpKind::IndepHalfGamma;
  Index p = 0;
  Index n = 0;
  std::uint64_t seed = 0;
  int factors = 2;     // r
  double share = 0.1;  // fraction of heterogeneous rows (loadings, α) or time points (factors)
  double spike = 0.5;  // first entry of d in the spike alternative

  /// Throws Error(InvalidSpec).
  void validate() const;
};

/// I + d eᵀ + e dᵀ with d = (spike, 0, …, 0)ᵀ and e the all-ones vector.
Eigen::MatrixXd spike_matrix(Index p, double spike);

struct GeneratedData {
  Eigen::MatrixXd values;  // p×n observations
  Eigen::MatrixXd noise;   // z (independence kinds) or ε (factor and α kinds)
};

/// Draws from std::mt19937_64 seeded with spec.seed: model parameters first, then noise,
/// each matrix filled row by row.
GeneratedData generate_components(const DgpSpec& spec);
DataMatrix generate(const DgpSpec& spec);

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// base ⊕ splitmix64(splitmix64(cell) + replicate).
std::uint64_t replicate_seed(std::uint64_t base, std::size_t cell, std::size_t replicate);

inline constexpr std::string_view kSeedRule =
    "seed = base XOR splitmix64(splitmix64(cell) + replicate); generator std::mt19937_64";

struct ExperimentConfig {
  std::vector<DgpSpec> grid;  // spec.seed is ignored; replicate seeds are derived
  TestKind test = TestKind::Independence;
  TestFunction f = TestFunction::square();
  std::size_t replications = 1000;
  double alpha = 0.05;
  std::uint64_t base_seed = 20240601;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SimulationCell {
  DgpSpec spec;
  std::size_t rejections = 0;
  std::size_t replications = 0;
  double rate = 0.0;
  double standard_error = 0.0;  // √(rate(1 − rate)/K)
  bool completed = true;
  std::string diagnostic;  // first failing replicate, if any
};

struct SimulationReport {
  std::vector<SimulationCell> cells;
  TestKind test = TestKind::Independence;
  std::string function;
  std::size_t replications = 0;
  double alpha = 0.05;
  std::uint64_t base_seed = 0;
  std::string seed_rule{kSeedRule};
};

/// Runs K seeded replications per cell. Results do not depend on the thread count.
SimulationReport run_experiment(const ExperimentConfig& config);

}  // namespace corrlss
