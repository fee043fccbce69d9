#include "corrlss/dgp_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "corrlss/error.hpp"

namespace corrlss {
namespace {

using Rng = std::mt19937_64;

Eigen::MatrixXd normal_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index t = 0; t < cols; ++t) out(i, t) = normal(rng);
  }
  return out;
}

Eigen::MatrixXd half_gamma_noise(Rng& rng, Index p, Index n) {
  std::normal_distribution<double> normal;
  std::gamma_distribution<double> gamma(1.0, 1.0);
  const Index normal_rows = p / 2;
  Eigen::MatrixXd z(p, n);
  for (Index i = 0; i < p; ++i) {
    for (Index t = 0; t < n; ++t) z(i, t) = i < normal_rows ? normal(rng) : gamma(rng) - 1.0;
  }
  return z;
}

/// F_t = a F_{t−1} + η_t, F_0 = 0.
Eigen::MatrixXd ar1_factors(Rng& rng, int r, Index n, double a = 0.2) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd f(r, n);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(r);
  for (Index t = 0; t < n; ++t) {
    for (int k = 0; k < r; ++k) prev(k) = a * prev(k) + normal(rng);
    f.col(t) = prev;
  }
  return f;
}

Index heterogeneous_count(double share, Index size) {
  return static_cast<Index>(std::floor(share * static_cast<double>(size)));
}

}  // namespace

std::string_view to_string(DgpKind kind) {
  switch (kind) {
    case DgpKind::IndepHalfGamma: return "indep-half-gamma";
    case DgpKind::DependentRankOne: return "dependent-rank-one";
    case DgpKind::DependentSpike: return "dependent-spike";
    case DgpKind::FactorCommonLoading: return "factor-common-loading";
    case DgpKind::FactorHeteroLoading: return "factor-hetero-loading";
    case DgpKind::FactorConstantFactor: return "factor-constant-factor";
    case DgpKind::FactorHeteroFactor: return "factor-hetero-factor";
    case DgpKind::AlphaCommon: return "alpha-common";
    case DgpKind::AlphaHetero: return "alpha-hetero";
  }
  return "indep-half-gamma";
}

DgpKind parse_dgp_kind(std::string_view text) {
  for (auto kind : {DgpKind::IndepHalfGamma, DgpKind::DependentRankOne, DgpKind::DependentSpike,
                    DgpKind::FactorCommonLoading, DgpKind::FactorHeteroLoading,
                    DgpKind::FactorConstantFactor, DgpKind::FactorHeteroFactor,
                    DgpKind::AlphaCommon, DgpKind::AlphaHetero}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(Errc::InvalidSpec, "unknown DGP '" + std::string(text) + "'");
}

void DgpSpec::validate() const {
  if (p < 2 || n < 2) throw Error(Errc::InvalidSpec, "p and n must be at least 2");
  if (factors < 1) throw Error(Errc::InvalidSpec, "number of factors must be positive");
  if (!(share > 0.0 && share <= 1.0)) throw Error(Errc::InvalidSpec, "share must lie in (0, 1]");
  if (!std::isfinite(spike)) throw Error(Errc::InvalidSpec, "spike must be finite");
}

Eigen::MatrixXd spike_matrix(Index p, double spike) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(p, p);
  t.row(0).array() += spike;
  t.col(0).array() += spike;
  return t;
}

GeneratedData generate_components(const DgpSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal;
  const Index p = spec.p;
  const Index n = spec.n;
  const int r = spec.factors;
  GeneratedData out;

  switch (spec.kind) {
    case DgpKind::IndepHalfGamma:
      out.noise = half_gamma_noise(rng, p, n);
      out.values = out.noise;
      break;
    case DgpKind::DependentRankOne: {
      const Eigen::VectorXd u = normal_matrix(rng, p, 1);
      const Eigen::VectorXd v = normal_matrix(rng, p, 1);
      out.noise = half_gamma_noise(rng, p, n);
      out.values = out.noise + (u / std::sqrt(static_cast<double>(n))) * (v.transpose() * out.noise);
      break;
    }
    case DgpKind::DependentSpike:
      out.noise = half_gamma_noise(rng, p, n);
      out.values = spike_matrix(p, spec.spike) * out.noise;
      break;
    case DgpKind::FactorCommonLoading:
    case DgpKind::FactorHeteroLoading: {
      const Eigen::RowVectorXd common = normal_matrix(rng, 1, r);
      Eigen::MatrixXd loadings = common.replicate(p, 1);
      if (spec.kind == DgpKind::FactorHeteroLoading) {
        const Index k = heterogeneous_count(spec.share, p);
        loadings.bottomRows(k) = normal_matrix(rng, k, r);
      }
      const Eigen::MatrixXd factors = ar1_factors(rng, r, n);
      out.noise = normal_matrix(rng, p, n);
      out.values = loadings * factors + out.noise;
      break;
    }
    case DgpKind::FactorConstantFactor:
    case DgpKind::FactorHeteroFactor: {
      const Eigen::MatrixXd loadings = normal_matrix(rng, p, r);
      const Eigen::VectorXd common = normal_matrix(rng, r, 1);
      Eigen::MatrixXd factors = common.replicate(1, n);
      if (spec.kind == DgpKind::FactorHeteroFactor) {
        const Index k = heterogeneous_count(spec.share, n);
        factors.rightCols(k) = normal_matrix(rng, r, k);
      }
      out.noise = normal_matrix(rng, p, n);
      out.values = loadings * factors + out.noise;
      break;
    }
    case DgpKind::AlphaCommon:
    case DgpKind::AlphaHetero: {
      Eigen::VectorXd alpha = Eigen::VectorXd::Constant(p, normal(rng));
      if (spec.kind == DgpKind::AlphaHetero) {
        const Index k = heterogeneous_count(spec.share, p);
        alpha.tail(k) = normal_matrix(rng, k, 1);
      }
      const Eigen::RowVectorXd trend =
          Eigen::RowVectorXd::LinSpaced(n, 1.0, static_cast<double>(n)) / static_cast<double>(n);
      out.noise = normal_matrix(rng, p, n);
      out.values = out.noise;
      out.values.colwise() += alpha;
      out.values.rowwise() += trend;
      break;
    }
  }
  return out;
}

DataMatrix generate(const DgpSpec& spec) { return DataMatrix(generate_components(spec).values); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t cell, std::size_t replicate) {
  return base ^ splitmix64(splitmix64(cell) + replicate);
}

SimulationReport run_experiment(const ExperimentConfig& config) {
  if (config.replications < 1) throw Error(Errc::InvalidArgument, "K must be at least 1");
  for (const DgpSpec& spec : config.grid) spec.validate();

  const TestEngine engine(config.test, TestOptions{config.f, config.alpha});
  const std::size_t cells = config.grid.size();
  const std::size_t reps = config.replications;
  const std::size_t total = cells * reps;

  // 1 reject, 0 accept, −1 failed; merged by index after all workers finish.
  std::vector<signed char> outcome(total, 0);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> first_failure(cells, kNone);
  std::vector<std::string> diagnostics(cells);
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t cell = job / reps;
      const std::size_t rep = job % reps;
      DgpSpec spec = config.grid[cell];
      spec.seed = replicate_seed(config.base_seed, cell, rep);
      try {
        outcome[job] = engine.run(generate(spec)).reject ? 1 : 0;
      } catch (const std::exception& e) {
        outcome[job] = -1;
        std::lock_guard lock(failure_mutex);
        if (rep < first_failure[cell]) {
          first_failure[cell] = rep;
          diagnostics[cell] = "replicate " + std::to_string(rep) + ": " + e.what();
        }
      }
    }
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(total, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  SimulationReport report;
  report.test = config.test;
  report.function = config.f.name();
  report.replications = reps;
  report.alpha = config.alpha;
  report.base_seed = config.base_seed;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SimulationCell out;
    out.spec = config.grid[cell];
    out.spec.seed = config.base_seed;
    out.replications = reps;
    if (first_failure[cell] != kNone) {
      out.completed = false;
      out.diagnostic = diagnostics[cell];
    } else {
      for (std::size_t rep = 0; rep < reps; ++rep) out.rejections += outcome[cell * reps + rep] == 1;
      out.rate = static_cast<double>(out.rejections) / static_cast<double>(reps);
      out.standard_error = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(reps));
    }
    report.cells.push_back(std::move(out));
  }
  return report;
}

}  // namespace corrlss
