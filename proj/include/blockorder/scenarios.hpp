// Simulation scenarios used by the experiment harness.
//
// fig1: six communities over five layers mixing assortative and
// disassortative blocks; the free entries u1..u4 are U(0.6,1) draws,
// redrawn independently for every layer unless shared_u is set.
//
// sparse_table1: three communities over four layers with P^t = rho * S^t,
// S^t = Id + ones + eps_t and eps_t a symmetric U([-0.1,0.1]) perturbation.
//
// rate: two communities, per-layer diagonal U(0.7,1) and off-diagonal
// U(0,0.1); used for the convergence-rate grids.

#pragma once

#include "blockorder/params.hpp"
#include "blockorder/sampler.hpp"

#include <cstdint>
#include <stdexcept>

namespace blockorder {

struct MlScenarioDraw {
  MlParams params;
  LabelAssignment labels;
  GraphCollection graphs;
  int k_true = 0;
};

inline MlParams fig1_params(std::uint64_t seed, int layers = 5, bool shared_u = false) {
  Rng rng(derive_stream(seed, {hash_tag("fig1-params")}));
  MlParams params;
  params.pi = Eigen::VectorXd::Constant(6, 1.0 / 6.0);
  double u[4];
  for (double& v : u) v = rng.uniform(0.6, 1.0);
  for (int t = 0; t < layers; ++t) {
    if (!shared_u && t > 0)
      for (double& v : u) v = rng.uniform(0.6, 1.0);
    Eigen::MatrixXd P(6, 6);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const bool upper_a = a < 3, upper_b = b < 3;
        if (upper_a != upper_b) P(a, b) = 0.2;          // across the two blocks
        else if (upper_a) P(a, b) = (a == b) ? u[a] : 0.4;
        else P(a, b) = (a == b) ? 0.4 : u[3];           // disassortative block
      }
    params.P.push_back(std::move(P));
  }
  params.validate();
  return params;
}

inline MlScenarioDraw scenario_fig1(int n, std::uint64_t seed, int layers = 5,
                                    bool shared_u = false) {
  MlParams params = fig1_params(seed, layers, shared_u);
  auto [labels, graphs] = sample_mlsbm(n, params, derive_stream(seed, {hash_tag("fig1-sample")}));
  return MlScenarioDraw{std::move(params), std::move(labels), std::move(graphs), 6};
}

inline MlParams sparse_table1_params(double rho, std::uint64_t seed, int layers = 4) {
  if (!(rho > 0.0 && rho <= 0.45))
    throw std::invalid_argument("sparse_table1: rho must lie in (0, 0.45]");
  Rng rng(derive_stream(seed, {hash_tag("table1-params")}));
  SparsityScaling scaling;
  scaling.rho = Eigen::VectorXd::Constant(layers, rho);
  for (int t = 0; t < layers; ++t) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Ones(3, 3) + Eigen::MatrixXd::Identity(3, 3);
    // the perturbation must keep S symmetric: draw the upper triangle, mirror
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        const double eps = rng.uniform(-0.1, 0.1);
        S(a, b) += eps;
        if (a != b) S(b, a) += eps;
      }
    scaling.S.push_back(std::move(S));
  }
  scaling.validate();
  MlParams params;
  params.pi = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  params.P = scaling.scaled();
  params.validate();
  return params;
}

inline MlScenarioDraw scenario_sparse_table1(int n, double rho, std::uint64_t seed,
                                             int layers = 4) {
  MlParams params = sparse_table1_params(rho, seed, layers);
  auto [labels, graphs] = sample_mlsbm(n, params, derive_stream(seed, {hash_tag("table1-sample")}));
  return MlScenarioDraw{std::move(params), std::move(labels), std::move(graphs), 3};
}

inline MlParams rate_params(std::uint64_t seed, int layers, int k = 2) {
  Rng rng(derive_stream(seed, {hash_tag("rate-params")}));
  MlParams params;
  params.pi = Eigen::VectorXd::Constant(k, 1.0 / k);
  for (int t = 0; t < layers; ++t) {
    const double off = rng.uniform(0.0, 0.1);
    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(k, k, off);
    for (int a = 0; a < k; ++a) P(a, a) = rng.uniform(0.7, 1.0);
    params.P.push_back(std::move(P));
  }
  params.validate();
  return params;
}

inline MlScenarioDraw scenario_rate(int n, int layers, std::uint64_t seed, int k = 2) {
  MlParams params = rate_params(seed, layers, k);
  auto [labels, graphs] = sample_mlsbm(n, params, derive_stream(seed, {hash_tag("rate-sample")}));
  return MlScenarioDraw{std::move(params), std::move(labels), std::move(graphs), k};
}

}  // namespace blockorder
