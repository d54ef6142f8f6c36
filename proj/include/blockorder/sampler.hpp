// Samplers for the two generative models.  Both are pure functions of
// (n, params, seed): labels are drawn first, then each upper-triangle edge
// of each layer is an independent Bernoulli draw given the labels.

#pragma once

#include "blockorder/graph.hpp"
#include "blockorder/labels.hpp"
#include "blockorder/params.hpp"
#include "blockorder/rng.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace blockorder {

namespace detail {

inline void fill_layer_edges(GraphCollection& g, int t, const std::vector<int>& z,
                             const Eigen::MatrixXd& P, Rng& rng) {
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    const int a = z[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) {
      const double p = P(a, z[static_cast<std::size_t>(j)]);
      if (p > 0.0 && rng.uniform01() < p) g.set_edge(t, i, j, true);
    }
  }
}

}  // namespace detail

inline std::pair<LabelAssignment, GraphCollection> sample_mlsbm(int n, const MlParams& params,
                                                                std::uint64_t seed) {
  params.validate();
  const int k = params.k();
  const int T = params.layers();
  Rng rng(seed);

  std::vector<int> z(static_cast<std::size_t>(n));
  std::vector<double> pi(params.pi.data(), params.pi.data() + k);
  for (auto& zi : z) zi = rng.categorical(pi);

  GraphCollection g(n, T);
  for (int t = 0; t < T; ++t)
    detail::fill_layer_edges(g, t, z, params.P[static_cast<std::size_t>(t)], rng);
  return {LabelAssignment(k, std::move(z)), std::move(g)};
}

inline std::pair<LabelPath, GraphCollection> sample_dynsbm(int n, const DynParams& params,
                                                           std::uint64_t seed) {
  params.validate();
  const int k = params.k();
  const int T = params.layers();
  Rng rng(seed);

  // each node follows an independent stationary chain: first slice from
  // alpha, then row-wise transitions
  std::vector<std::vector<int>> path(static_cast<std::size_t>(T),
                                     std::vector<int>(static_cast<std::size_t>(n)));
  std::vector<double> alpha(params.alpha.data(), params.alpha.data() + k);
  std::vector<double> row(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) {
    int state = rng.categorical(alpha);
    path[0][static_cast<std::size_t>(i)] = state;
    for (int t = 1; t < T; ++t) {
      for (int b = 0; b < k; ++b) row[static_cast<std::size_t>(b)] = params.trans(state, b);
      state = rng.categorical(row);
      path[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = state;
    }
  }

  GraphCollection g(n, T);
  for (int t = 0; t < T; ++t)
    detail::fill_layer_edges(g, t, path[static_cast<std::size_t>(t)],
                             params.P[static_cast<std::size_t>(t)], rng);
  return {LabelPath(k, std::move(path)), std::move(g)};
}

}  // namespace blockorder
