// GraphCollection: T symmetric binary adjacency matrices on a shared node
// set, stored as packed bit rows.  Zero diagonal and symmetry are enforced
// at construction and on every mutation, so downstream code can assume both.

#pragma once

#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockorder {

class GraphCollection {
 public:
  GraphCollection(int n, int layers)
      : n_(n), T_(layers), words_(static_cast<std::size_t>((n + 63) / 64)),
        bits_(static_cast<std::size_t>(n) * static_cast<std::size_t>(layers) * words_, 0) {
    if (n <= 0) throw std::invalid_argument("GraphCollection: n must be positive");
    if (layers <= 0) throw std::invalid_argument("GraphCollection: T must be positive");
  }

  int n() const { return n_; }
  int layers() const { return T_; }

  bool edge(int t, int i, int j) const {
    const std::uint64_t word = row(t, i)[static_cast<std::size_t>(j) >> 6];
    return (word >> (j & 63)) & 1u;
  }

  void set_edge(int t, int i, int j, bool value) {
    check_index(t, i, j);
    if (i == j) {
      if (value) throw std::invalid_argument("GraphCollection: self-loops are not allowed");
      return;
    }
    set_bit(t, i, j, value);
    set_bit(t, j, i, value);
  }

  long long edges_in_layer(int t) const {
    long long twice = 0;
    for (int i = 0; i < n_; ++i) {
      const std::uint64_t* r = row(t, i);
      for (std::size_t w = 0; w < words_; ++w) twice += std::popcount(r[w]);
    }
    return twice / 2;
  }

  int degree(int t, int i) const {
    const std::uint64_t* r = row(t, i);
    int d = 0;
    for (std::size_t w = 0; w < words_; ++w) d += std::popcount(r[w]);
    return d;
  }

  // Calls fn(j) for every neighbor j of node i in layer t.
  template <typename Fn>
  void for_each_neighbor(int t, int i, Fn&& fn) const {
    const std::uint64_t* r = row(t, i);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = r[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        fn(static_cast<int>(w * 64) + b);
        bits &= bits - 1;
      }
    }
  }

  GraphCollection layer_copy(int t) const {
    GraphCollection g(n_, 1);
    for (int i = 0; i < n_; ++i)
      for_each_neighbor(t, i, [&](int j) {
        if (j > i) g.set_edge(0, i, j, true);
      });
    return g;
  }

  GraphCollection permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != n_)
      throw std::invalid_argument("GraphCollection::permuted: bad permutation size");
    GraphCollection g(n_, T_);
    for (int t = 0; t < T_; ++t)
      for (int i = 0; i < n_; ++i)
        for_each_neighbor(t, i, [&](int j) {
          if (j > i) g.set_edge(t, perm[static_cast<std::size_t>(i)],
                                perm[static_cast<std::size_t>(j)], true);
        });
    return g;
  }

  // Builds from dense 0/1 matrices, rejecting asymmetric input, nonzero
  // diagonals and entries other than 0 or 1.
  static GraphCollection from_dense(const std::vector<std::vector<std::vector<int>>>& layers) {
    if (layers.empty()) throw std::invalid_argument("GraphCollection: no layers");
    const int T = static_cast<int>(layers.size());
    const int n = static_cast<int>(layers[0].size());
    GraphCollection g(n, T);
    for (int t = 0; t < T; ++t) {
      const auto& m = layers[static_cast<std::size_t>(t)];
      if (static_cast<int>(m.size()) != n)
        throw std::invalid_argument("GraphCollection: layer " + std::to_string(t) + " has wrong row count");
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(m[static_cast<std::size_t>(i)].size()) != n)
          throw std::invalid_argument("GraphCollection: ragged adjacency matrix");
        for (int j = 0; j < n; ++j) {
          const int v = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          if (v != 0 && v != 1)
            throw std::invalid_argument("GraphCollection: entries must be 0 or 1");
          if (i == j && v != 0)
            throw std::invalid_argument("GraphCollection: diagonal must be zero");
          if (j < i) {
            if (v != (g.edge(t, i, j) ? 1 : 0))
              throw std::invalid_argument("GraphCollection: adjacency matrix is not symmetric");
          } else if (v == 1) {
            g.set_edge(t, i, j, true);
          }
        }
      }
    }
    return g;
  }

  bool operator==(const GraphCollection& o) const {
    return n_ == o.n_ && T_ == o.T_ && bits_ == o.bits_;
  }

 private:
  const std::uint64_t* row(int t, int i) const {
    return bits_.data() + (static_cast<std::size_t>(t) * n_ + i) * words_;
  }

  void set_bit(int t, int i, int j, bool value) {
    std::uint64_t* word =
        bits_.data() + (static_cast<std::size_t>(t) * n_ + i) * words_ + (static_cast<std::size_t>(j) >> 6);
    const std::uint64_t mask = 1ULL << (j & 63);
    if (value) *word |= mask; else *word &= ~mask;
  }

  void check_index(int t, int i, int j) const {
    if (t < 0 || t >= T_ || i < 0 || i >= n_ || j < 0 || j >= n_)
      throw std::out_of_range("GraphCollection: index out of range");
  }

  int n_;
  int T_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace blockorder
