#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace corrlss::testing {

inline Eigen::MatrixXd gaussian(Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(p, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index t = 0; t < n; ++t) x(i, t) = normal(rng);
  }
  return x;
}

inline Eigen::MatrixXd rademacher(Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin;
  Eigen::MatrixXd x(p, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index t = 0; t < n; ++t) x(i, t) = coin(rng) ? 1.0 : -1.0;
  }
  return x;
}

}  // namespace corrlss::testing
