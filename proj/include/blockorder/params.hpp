// Parameter bundles for the multi-layer and dynamic block models, plus the
// stationary distribution solver used to initialize dynamic label chains.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockorder {

namespace detail {

inline void check_connectivity_matrices(const std::vector<Eigen::MatrixXd>& P, int k,
                                        const char* who) {
  if (P.empty()) throw std::invalid_argument(std::string(who) + ": needs at least one layer");
  for (const auto& m : P) {
    if (m.rows() != k || m.cols() != k)
      throw std::invalid_argument(std::string(who) + ": connectivity matrix has wrong shape");
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const double v = m(a, b);
        if (!(v >= 0.0 && v <= 1.0))
          throw std::invalid_argument(std::string(who) + ": connectivity entries must lie in [0,1]");
        if (std::abs(m(a, b) - m(b, a)) > 1e-12)
          throw std::invalid_argument(std::string(who) + ": connectivity matrix must be symmetric");
      }
  }
}

}  // namespace detail

struct MlParams {
  Eigen::VectorXd pi;               // class proportions, length k
  std::vector<Eigen::MatrixXd> P;   // per-layer symmetric k x k edge probabilities

  int k() const { return static_cast<int>(pi.size()); }
  int layers() const { return static_cast<int>(P.size()); }

  void validate() const {
    if (pi.size() == 0) throw std::invalid_argument("MlParams: empty proportion vector");
    double sum = 0.0;
    for (int a = 0; a < pi.size(); ++a) {
      if (pi(a) < 0.0) throw std::invalid_argument("MlParams: proportions must be nonnegative");
      sum += pi(a);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("MlParams: proportions must sum to 1");
    detail::check_connectivity_matrices(P, k(), "MlParams");
  }
};

// Left fixed point of a row-stochastic matrix by power iteration.  Strong
// connectivity of the positive-entry digraph is checked first so plainly
// reducible inputs (e.g. the identity) fail fast instead of silently
// returning one of many fixed points.
inline Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& trans,
                                               int max_iters = 100000, double tol = 1e-12) {
  const int k = static_cast<int>(trans.rows());
  if (trans.cols() != k || k < 1)
    throw std::invalid_argument("stationary_distribution: matrix must be square");
  for (int a = 0; a < k; ++a) {
    double row = 0.0;
    for (int b = 0; b < k; ++b) {
      if (trans(a, b) < 0.0)
        throw std::invalid_argument("stationary_distribution: negative transition probability");
      row += trans(a, b);
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw std::invalid_argument("stationary_distribution: rows must sum to 1");
  }

  // reachability closure over positive entries
  auto reachable_from = [&](int start) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < k; ++b)
        if (trans(a, b) > 0.0 && !seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = true;
          stack.push_back(b);
        }
    }
    return seen;
  };
  const auto fwd = reachable_from(0);
  for (bool s : fwd)
    if (!s)
      throw std::runtime_error(
          "stationary_distribution: transition matrix appears reducible (not strongly connected)");
  for (int a = 1; a < k; ++a) {
    if (!reachable_from(a)[0])
      throw std::runtime_error(
          "stationary_distribution: transition matrix appears reducible (not strongly connected)");
  }

  Eigen::RowVectorXd alpha = Eigen::RowVectorXd::Constant(k, 1.0 / k);
  for (int it = 0; it < max_iters; ++it) {
    Eigen::RowVectorXd next = alpha * trans;
    next /= next.sum();
    const double delta = (next - alpha).cwiseAbs().maxCoeff();
    alpha = next;
    if (delta <= tol) {
      const double residual = (alpha * trans - alpha).cwiseAbs().maxCoeff();
      if (residual > 1e-10)
        throw std::runtime_error("stationary_distribution: fixed-point residual too large");
      return alpha.transpose();
    }
  }
  throw std::runtime_error(
      "stationary_distribution: no convergence; matrix may be reducible or periodic");
}

struct DynParams {
  Eigen::MatrixXd trans;            // row-stochastic k x k transition matrix
  std::vector<Eigen::MatrixXd> P;   // per-layer symmetric k x k, constant diagonal across layers
  Eigen::VectorXd alpha;            // stationary distribution of trans (cached)

  DynParams() = default;
  DynParams(Eigen::MatrixXd trans_, std::vector<Eigen::MatrixXd> P_)
      : trans(std::move(trans_)), P(std::move(P_)) {
    alpha = stationary_distribution(trans);
    validate();
  }

  int k() const { return static_cast<int>(trans.rows()); }
  int layers() const { return static_cast<int>(P.size()); }

  void validate() const {
    const int kk = k();
    if (trans.cols() != kk || kk < 1)
      throw std::invalid_argument("DynParams: transition matrix must be square");
    for (int a = 0; a < kk; ++a) {
      double row = 0.0;
      for (int b = 0; b < kk; ++b) {
        if (trans(a, b) < 0.0) throw std::invalid_argument("DynParams: negative transition probability");
        row += trans(a, b);
      }
      if (std::abs(row - 1.0) > 1e-12)
        throw std::invalid_argument("DynParams: transition rows must sum to 1");
    }
    detail::check_connectivity_matrices(P, kk, "DynParams");
    for (std::size_t t = 1; t < P.size(); ++t)
      for (int a = 0; a < kk; ++a)
        if (std::abs(P[t](a, a) - P[0](a, a)) > 1e-12)
          throw std::invalid_argument(
              "DynParams: diagonal connectivity must not depend on the layer");
    if (alpha.size() != kk)
      throw std::invalid_argument("DynParams: stationary vector has wrong size");
    const double residual = (alpha.transpose() * trans - alpha.transpose()).cwiseAbs().maxCoeff();
    if (residual > 1e-10)
      throw std::invalid_argument("DynParams: alpha is not a left fixed point of trans");
  }
};

// Sparse-regime parameterization P^t = rho^t * S^t with the base matrices
// held fixed as n grows.
struct SparsityScaling {
  Eigen::VectorXd rho;              // per-layer scale factors in (0,1]
  std::vector<Eigen::MatrixXd> S;   // base matrices, entries >= 0

  int layers() const { return static_cast<int>(S.size()); }

  void validate() const {
    if (S.empty() || rho.size() != layers())
      throw std::invalid_argument("SparsityScaling: rho/S size mismatch");
    for (int t = 0; t < layers(); ++t) {
      if (!(rho(t) > 0.0 && rho(t) <= 1.0))
        throw std::invalid_argument("SparsityScaling: rho must lie in (0,1]");
      if ((rho(t) * S[static_cast<std::size_t>(t)].array() > 1.0).any())
        throw std::invalid_argument("SparsityScaling: rho * S exceeds 1 somewhere");
      if ((S[static_cast<std::size_t>(t)].array() < 0.0).any())
        throw std::invalid_argument("SparsityScaling: base matrix entries must be nonnegative");
    }
  }

  std::vector<Eigen::MatrixXd> scaled() const {
    std::vector<Eigen::MatrixXd> P;
    P.reserve(S.size());
    for (int t = 0; t < layers(); ++t) P.push_back(rho(t) * S[static_cast<std::size_t>(t)]);
    return P;
  }
};

}  // namespace blockorder
