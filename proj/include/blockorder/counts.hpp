// Sufficient statistics of a labeled graph collection: group sizes, pair
// counts, per-layer edge counts between groups and (for label paths) the
// transition counts.  Everything downstream -- likelihoods, evidence,
// profile estimators -- is a function of these counters.

#pragma once

#include "blockorder/graph.hpp"
#include "blockorder/labels.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace blockorder {

using MatLL = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using VecLL = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

struct BlockCounts {
  int k = 0;
  int T = 0;
  int n = 0;
  bool per_layer = false;  // true when built from a LabelPath

  // size 1 when shared across layers (multi-layer model), size T otherwise
  std::vector<VecLL> group_sizes;
  std::vector<MatLL> pair_counts;

  // edge_counts[t] is symmetric; the diagonal holds within-group edge counts
  // (each edge once), off-diagonals the between-group counts o_ab
  std::vector<MatLL> edge_counts;

  MatLL transitions;  // k x k, empty unless built from a LabelPath
  std::vector<long long> total_edges;

  const VecLL& sizes(int t) const { return group_sizes[per_layer ? static_cast<std::size_t>(t) : 0]; }
  const MatLL& pairs(int t) const { return pair_counts[per_layer ? static_cast<std::size_t>(t) : 0]; }

  // o~ doubles the diagonal so that sum_{a,b} o~_ab = 2 * edges(t).
  MatLL o_tilde(int t) const {
    MatLL m = edge_counts[static_cast<std::size_t>(t)];
    for (int a = 0; a < k; ++a) m(a, a) *= 2;
    return m;
  }

  void validate() const {
    for (const auto& sizes_t : group_sizes) {
      long long total = 0;
      for (int a = 0; a < k; ++a) total += sizes_t(a);
      if (total != n) throw std::logic_error("BlockCounts: group sizes do not sum to n");
    }
    for (int t = 0; t < T; ++t) {
      long long edges = 0;
      for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
          const long long o = edge_counts[static_cast<std::size_t>(t)](a, b);
          if (o < 0 || o > pairs(t)(a, b))
            throw std::logic_error("BlockCounts: edge count exceeds pair count");
          edges += o;
        }
      if (edges != total_edges[static_cast<std::size_t>(t)])
        throw std::logic_error("BlockCounts: per-layer edge total mismatch");
    }
    if (per_layer && transitions.size() > 0) {
      long long total = 0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) total += transitions(a, b);
      if (total != static_cast<long long>(n) * (T - 1))
        throw std::logic_error("BlockCounts: transition counts do not sum to n(T-1)");
    }
  }
};

namespace detail {

inline MatLL pair_count_matrix(const VecLL& sizes) {
  const int k = static_cast<int>(sizes.size());
  MatLL pairs(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      pairs(a, b) = (a == b) ? sizes(a) * (sizes(a) - 1) / 2 : sizes(a) * sizes(b);
  return pairs;
}

inline MatLL edge_count_matrix(const std::vector<int>& z, const GraphCollection& g, int t, int k) {
  MatLL o = MatLL::Zero(k, k);
  for (int i = 0; i < g.n(); ++i) {
    const int a = z[static_cast<std::size_t>(i)];
    g.for_each_neighbor(t, i, [&](int j) {
      if (j > i) o(a, z[static_cast<std::size_t>(j)]) += 1;
    });
  }
  // fold the two orientations into a symmetric matrix
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      o(a, b) += o(b, a);
      o(b, a) = o(a, b);
    }
  return o;
}

}  // namespace detail

inline BlockCounts block_counts(const LabelAssignment& z, const GraphCollection& g) {
  if (z.n() != g.n())
    throw std::invalid_argument("block_counts: labeling length does not match node count");
  z.validate();
  BlockCounts c;
  c.k = z.k;
  c.T = g.layers();
  c.n = g.n();
  c.per_layer = false;
  VecLL sizes = VecLL::Zero(z.k);
  for (int zi : z.labels) sizes(zi) += 1;
  c.group_sizes.push_back(sizes);
  c.pair_counts.push_back(detail::pair_count_matrix(sizes));
  for (int t = 0; t < c.T; ++t) {
    c.edge_counts.push_back(detail::edge_count_matrix(z.labels, g, t, z.k));
    c.total_edges.push_back(g.edges_in_layer(t));
  }
  c.validate();
  return c;
}

inline BlockCounts block_counts(const LabelPath& z, const GraphCollection& g) {
  if (z.n() != g.n())
    throw std::invalid_argument("block_counts: labeling length does not match node count");
  if (z.layers() != g.layers())
    throw std::invalid_argument("block_counts: label path length does not match layer count");
  z.validate();
  BlockCounts c;
  c.k = z.k;
  c.T = g.layers();
  c.n = g.n();
  c.per_layer = true;
  for (int t = 0; t < c.T; ++t) {
    const auto& slice = z.labels[static_cast<std::size_t>(t)];
    VecLL sizes = VecLL::Zero(z.k);
    for (int zi : slice) sizes(zi) += 1;
    c.group_sizes.push_back(sizes);
    c.pair_counts.push_back(detail::pair_count_matrix(sizes));
    c.edge_counts.push_back(detail::edge_count_matrix(slice, g, t, z.k));
    c.total_edges.push_back(g.edges_in_layer(t));
  }
  c.transitions = MatLL::Zero(z.k, z.k);
  for (int t = 0; t + 1 < c.T; ++t)
    for (int i = 0; i < c.n; ++i)
      c.transitions(z.labels[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)],
                    z.labels[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(i)]) += 1;
  c.validate();
  return c;
}

}  // namespace blockorder
