// Spectral clustering on the aggregated adjacency matrix (used to seed the
// variational fits) and the Bethe-Hessian order-selection baseline.

#pragma once

#include "blockorder/graph.hpp"
#include "blockorder/labels.hpp"
#include "blockorder/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace blockorder {

struct SpectralConfig {
  int kmeans_restarts = 10;
  int kmeans_iters = 100;

  void validate() const {
    if (kmeans_restarts < 1 || kmeans_iters < 1)
      throw std::invalid_argument("SpectralConfig: counts must be positive");
  }
};

namespace detail {

// Lloyd iterations with k-means++ seeding; returns (labels, inertia).
inline std::pair<std::vector<int>, double> kmeans_once(const Eigen::MatrixXd& points, int k,
                                                       int max_iters, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centers(k, points.cols());

  // k-means++: first center uniform, others by squared-distance weighting
  centers.row(0) = points.row(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      double u = rng.uniform01() * total;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        u -= dist2(i);
        if (u < 0.0) { pick = i; break; }
      }
    }
    centers.row(c) = points.row(pick);
    dist2 = dist2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  double inertia = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) { best_d = d; best = c; }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
      inertia += best_d;
    }
    if (!changed && it > 0) break;
    centers.setZero();
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (int i = 0; i < n; ++i) {
      centers.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      counts(labels[static_cast<std::size_t>(i)]) += 1;
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) {
        centers.row(c) /= counts(c);
      } else {
        // re-seed an empty cluster at the point farthest from its center
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = (points.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
          if (d > far_d) { far_d = d; far = i; }
        }
        centers.row(c) = points.row(far);
      }
    }
  }
  return {std::move(labels), inertia};
}

}  // namespace detail

inline Eigen::MatrixXd aggregate_adjacency(const GraphCollection& g) {
  Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(g.n(), g.n());
  for (int t = 0; t < g.layers(); ++t)
    for (int i = 0; i < g.n(); ++i)
      g.for_each_neighbor(t, i, [&](int j) { agg(i, j) += 1.0; });
  return agg;
}

// Clusters the rows of the top-|eigenvalue| eigenvector matrix of the
// layer-aggregated adjacency.  Deterministic given the seed.
inline LabelAssignment spectral_cluster(const GraphCollection& g, int k,
                                        const SpectralConfig& cfg = {}, std::uint64_t seed = 0) {
  cfg.validate();
  if (k < 1 || k > g.n())
    throw std::invalid_argument("spectral_cluster: need 1 <= k <= n");
  if (k == 1) return LabelAssignment(1, std::vector<int>(static_cast<std::size_t>(g.n()), 0));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(aggregate_adjacency(g));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_cluster: eigendecomposition failed");

  std::vector<int> order(static_cast<std::size_t>(g.n()));
  std::iota(order.begin(), order.end(), 0);
  const auto& evals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(evals(a)) > std::abs(evals(b));
  });
  Eigen::MatrixXd features(g.n(), k);
  for (int c = 0; c < k; ++c) features.col(c) = solver.eigenvectors().col(order[static_cast<std::size_t>(c)]);

  Rng rng(derive_stream(seed, {hash_tag("spectral-kmeans")}));
  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.kmeans_restarts; ++r) {
    auto [labels, inertia] = detail::kmeans_once(features, k, cfg.kmeans_iters, rng);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = std::move(labels);
    }
  }
  return LabelAssignment(k, std::move(best_labels));
}

struct BhmcResult {
  int k_selected = 0;
  bool empty_graph = false;
};

// Bethe-Hessian with moment-corrected radius r = sqrt(sum d_i^2 / sum d_i - 1):
// the selected order is the number of negative eigenvalues of
// H(r) = (r^2 - 1) I - r A + D, capped at k_max.  Eigenvalues within 1e-10
// of zero count as non-negative.
inline BhmcResult bhmc_select(const Eigen::MatrixXd& adjacency, int k_max) {
  const int n = static_cast<int>(adjacency.rows());
  if (n < 2 || adjacency.cols() != n)
    throw std::invalid_argument("bhmc_select: need a square adjacency with n >= 2");
  Eigen::VectorXd deg = adjacency.rowwise().sum();
  const double d1 = deg.sum();
  if (d1 <= 0.0) return {0, true};
  const double ratio = deg.squaredNorm() / d1 - 1.0;
  const double r = std::sqrt(std::max(ratio, 0.0));
  Eigen::MatrixXd h = -r * adjacency;
  h.diagonal() += deg;
  h.diagonal().array() += r * r - 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("bhmc_select: eigendecomposition failed");
  int negatives = 0;
  for (int i = 0; i < n; ++i)
    if (solver.eigenvalues()(i) < -1e-10) ++negatives;
  return {std::min(negatives, k_max), false};
}

inline BhmcResult bhmc_select(const GraphCollection& g, int t, int k_max) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n(), g.n());
  for (int i = 0; i < g.n(); ++i)
    g.for_each_neighbor(t, i, [&](int j) { a(i, j) = 1.0; });
  return bhmc_select(a, k_max);
}

}  // namespace blockorder
