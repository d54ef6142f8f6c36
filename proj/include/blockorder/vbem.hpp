// Mean-field Variational Bayes EM for the multi-layer model.
//
// The factorized posterior q(z) q(pi) q(P) is optimized by coordinate
// ascent under the Dirichlet(1/2) / Beta(1/2,1/2) priors of the exact
// evidence, so the resulting ELBO is a lower bound for log KT_k and serves
// as its surrogate when enumeration is out of reach.  Updates per sweep:
// q(pi), then q(P), then the responsibility rows one node at a time
// (sequential, so every step is an exact coordinate maximization and the
// bound can only go up).
//
// There is intentionally no dynamic-model variant; the dynamic estimator
// runs on the exact engine only.

#pragma once

#include "blockorder/exact.hpp"
#include "blockorder/graph.hpp"
#include "blockorder/special.hpp"
#include "blockorder/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blockorder {

struct VbemConfig {
  int max_iters = 500;
  double tol = 1e-7;  // relative ELBO change per sweep
  int restarts = 5;
  enum class Init { spectral, random } init = Init::spectral;
  SpectralConfig spectral;

  void validate() const {
    if (max_iters < 1 || restarts < 1 || !(tol > 0.0))
      throw std::invalid_argument("VbemConfig: values must be positive");
  }
};

struct VariationalState {
  Eigen::MatrixXd tau;                 // n x k responsibilities, rows on the simplex
  Eigen::VectorXd gamma;               // Dirichlet pseudo-counts for pi
  std::vector<Eigen::MatrixXd> eta;    // per-layer Beta pseudo-counts (edges)
  std::vector<Eigen::MatrixXd> zeta;   // per-layer Beta pseudo-counts (non-edges)
  double elbo_value = 0.0;
  std::vector<double> sweep_elbos;     // bound after every accepted sweep
};

namespace detail {

// Expected edge and pair counts between blocks under tau.  Row/col symmetric;
// the diagonal holds unordered within-block expectations.
struct ExpectedCounts {
  std::vector<Eigen::MatrixXd> obar;  // per layer
  std::vector<Eigen::MatrixXd> nbar;  // shared across layers but stored once
};

inline ExpectedCounts expected_counts(const GraphCollection& g, const Eigen::MatrixXd& tau) {
  const int n = g.n();
  const int k = static_cast<int>(tau.cols());
  ExpectedCounts out;
  Eigen::VectorXd colsum = tau.colwise().sum();
  Eigen::MatrixXd gram = tau.transpose() * tau;  // sum_i tau_ia tau_ib
  Eigen::MatrixXd nbar(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      nbar(a, b) = (a == b) ? 0.5 * (colsum(a) * colsum(a) - gram(a, a))
                            : colsum(a) * colsum(b) - gram(a, b);
  out.nbar.push_back(std::move(nbar));
  Eigen::MatrixXd atau(n, k);
  for (int t = 0; t < g.layers(); ++t) {
    atau.setZero();
    for (int i = 0; i < n; ++i)
      g.for_each_neighbor(t, i, [&](int j) { atau.row(i) += tau.row(j); });
    Eigen::MatrixXd w = tau.transpose() * atau;  // sum_{i != j} tau_ia tau_jb A_ij
    for (int a = 0; a < k; ++a) w(a, a) *= 0.5;
    out.obar.push_back(std::move(w));
  }
  return out;
}

inline void optimal_beta_counts(const GraphCollection& g, const Eigen::MatrixXd& tau,
                                std::vector<Eigen::MatrixXd>& eta,
                                std::vector<Eigen::MatrixXd>& zeta) {
  ExpectedCounts ec = expected_counts(g, tau);
  eta.clear();
  zeta.clear();
  for (int t = 0; t < g.layers(); ++t) {
    eta.push_back(ec.obar[static_cast<std::size_t>(t)].array() + 0.5);
    zeta.push_back((ec.nbar[0] - ec.obar[static_cast<std::size_t>(t)]).array() + 0.5);
  }
}

}  // namespace detail

// Builds a state whose q(pi) and q(P) are the conditional optima for the
// given responsibilities.
inline VariationalState state_from_tau(const GraphCollection& g, Eigen::MatrixXd tau) {
  VariationalState st;
  st.gamma = tau.colwise().sum().array() + 0.5;
  detail::optimal_beta_counts(g, tau, st.eta, st.zeta);
  st.tau = std::move(tau);
  return st;
}

// Evidence lower bound of an arbitrary state; deterministic in the state and
// exact at conjugate optima (for k = 1 it reproduces the closed-form mass).
inline double elbo(const VariationalState& state, const GraphCollection& g, int k) {
  const int n = g.n();
  if (state.tau.rows() != n || state.tau.cols() != k)
    throw std::invalid_argument("elbo: state/tau shape mismatch");

  const double gamma_total = state.gamma.sum();
  const double psi_total = digamma(gamma_total);
  Eigen::VectorXd colsum = state.tau.colwise().sum();

  // Dirichlet block: log C(1/2 1) - log C(gamma) + sum (N_a + 1/2 - gamma_a) E[log pi_a]
  double value = std::lgamma(0.5 * k) - k * std::lgamma(0.5);
  value -= std::lgamma(gamma_total);
  for (int a = 0; a < k; ++a) {
    value += std::lgamma(state.gamma(a));
    value += (colsum(a) + 0.5 - state.gamma(a)) * (digamma(state.gamma(a)) - psi_total);
  }

  // Beta blocks, one per layer and unordered pair a <= b
  detail::ExpectedCounts ec = detail::expected_counts(g, state.tau);
  const double lbeta_half = log_beta(0.5, 0.5);
  for (int t = 0; t < g.layers(); ++t) {
    const auto& eta = state.eta[static_cast<std::size_t>(t)];
    const auto& zeta = state.zeta[static_cast<std::size_t>(t)];
    const auto& obar = ec.obar[static_cast<std::size_t>(t)];
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) {
        const double e = eta(a, b), z = zeta(a, b);
        const double psi_sum = digamma(e + z);
        const double elog_p = digamma(e) - psi_sum;
        const double elog_q = digamma(z) - psi_sum;
        const double o = obar(a, b);
        const double m = ec.nbar[0](a, b);
        value += log_beta(e, z) - lbeta_half;
        value += (o + 0.5 - e) * elog_p + (m - o + 0.5 - z) * elog_q;
      }
  }

  // label entropy
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < k; ++a) {
      const double tia = state.tau(i, a);
      if (tia > 0.0) value -= tia * std::log(tia);
    }
  return value;
}

namespace detail {

inline Eigen::MatrixXd vbem_initial_tau(const GraphCollection& g, int k, const VbemConfig& cfg,
                                        int restart, Rng& rng, std::uint64_t seed) {
  const int n = g.n();
  if (restart == 0 && cfg.init == VbemConfig::Init::spectral) {
    LabelAssignment hard = spectral_cluster(g, k, cfg.spectral, derive_stream(seed, {hash_tag("vbem-spectral")}));
    Eigen::MatrixXd tau = Eigen::MatrixXd::Constant(n, k, 0.1 / k);
    for (int i = 0; i < n; ++i) tau(i, hard.labels[static_cast<std::size_t>(i)]) += 0.9;
    return tau;
  }
  Eigen::MatrixXd tau(n, k);
  for (int i = 0; i < n; ++i) {
    const auto row = rng.flat_dirichlet(k);
    for (int a = 0; a < k; ++a) tau(i, a) = row[static_cast<std::size_t>(a)];
  }
  return tau;
}

struct VbemRun {
  VariationalState state;
  int iters = 0;
};

inline VbemRun vbem_single_fit(const GraphCollection& g, int k, const VbemConfig& cfg,
                               Eigen::MatrixXd tau0,
                               const std::vector<std::vector<int>>& adj) {
  const int n = g.n();
  const int T = g.layers();
  VariationalState st;
  st.tau = std::move(tau0);

  Eigen::VectorXd elog_pi(k);
  std::vector<Eigen::MatrixXd> edge_w(static_cast<std::size_t>(T)),
      gap_w(static_cast<std::size_t>(T));
  Eigen::VectorXd colsum = st.tau.colwise().sum();
  std::vector<double> m(static_cast<std::size_t>(T) * k);
  Eigen::VectorXd score(k), new_row(k);

  double previous = -std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= cfg.max_iters; ++sweep) {
    // q(pi); refresh the column sums so incremental updates cannot drift
    colsum = st.tau.colwise().sum();
    st.gamma = colsum.array() + 0.5;
    const double psi_total = digamma(st.gamma.sum());
    for (int a = 0; a < k; ++a) elog_pi(a) = digamma(st.gamma(a)) - psi_total;

    // q(P): Beta pseudo-counts and the digamma weights the tau update needs
    optimal_beta_counts(g, st.tau, st.eta, st.zeta);
    for (int t = 0; t < T; ++t) {
      auto& ew = edge_w[static_cast<std::size_t>(t)];
      auto& gw = gap_w[static_cast<std::size_t>(t)];
      ew.resize(k, k);
      gw.resize(k, k);
      const auto& eta = st.eta[static_cast<std::size_t>(t)];
      const auto& zeta = st.zeta[static_cast<std::size_t>(t)];
      for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
          const double psi_sum = digamma(eta(a, b) + zeta(a, b));
          ew(a, b) = ew(b, a) = digamma(eta(a, b)) - psi_sum;
          gw(a, b) = gw(b, a) = digamma(zeta(a, b)) - psi_sum;
        }
    }

    // responsibilities, sequentially so each row update is exact ascent
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < T; ++t) {
        double* mt = m.data() + static_cast<std::size_t>(t) * k;
        for (int b = 0; b < k; ++b) mt[b] = 0.0;
        for (int j : adj[static_cast<std::size_t>(t) * n + static_cast<std::size_t>(i)])
          for (int b = 0; b < k; ++b) mt[b] += st.tau(j, b);
      }
      for (int a = 0; a < k; ++a) {
        double s = elog_pi(a);
        for (int t = 0; t < T; ++t) {
          const double* mt = m.data() + static_cast<std::size_t>(t) * k;
          const auto& ew = edge_w[static_cast<std::size_t>(t)];
          const auto& gw = gap_w[static_cast<std::size_t>(t)];
          for (int b = 0; b < k; ++b) {
            const double others = colsum(b) - st.tau(i, b);
            s += mt[b] * ew(a, b) + (others - mt[b]) * gw(a, b);
          }
        }
        score(a) = s;
      }
      const double mx = score.maxCoeff();
      double total = 0.0;
      for (int a = 0; a < k; ++a) {
        new_row(a) = std::exp(score(a) - mx);
        total += new_row(a);
      }
      new_row /= total;
      // floor to keep digamma arguments and entropies finite
      total = 0.0;
      for (int a = 0; a < k; ++a) {
        if (new_row(a) < 1e-12) new_row(a) = 1e-12;
        total += new_row(a);
      }
      new_row /= total;
      colsum += new_row - st.tau.row(i).transpose();
      st.tau.row(i) = new_row;
    }

    const double bound = elbo(st, g, k);
    if (std::isnan(bound))
      throw std::runtime_error("vbem_fit: ELBO became NaN at sweep " + std::to_string(sweep));
    st.sweep_elbos.push_back(bound);
    st.elbo_value = bound;
    const double change = std::abs(bound - previous);
    if (sweep > 1 && change <= cfg.tol * std::max(1.0, std::abs(bound)))
      return {std::move(st), sweep};
    previous = bound;
  }
  return {std::move(st), cfg.max_iters};
}

}  // namespace detail

// Fits k blocks and returns the best state over restarts together with the
// ELBO packaged as a vbem-engine evidence value.
inline std::pair<VariationalState, LogEvidence> vbem_fit(const GraphCollection& g, int k,
                                                         const VbemConfig& cfg = {},
                                                         std::uint64_t seed = 0) {
  cfg.validate();
  if (k < 1 || k > g.n()) throw std::invalid_argument("vbem_fit: need 1 <= k <= n");

  const int n = g.n();
  const int T = g.layers();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(T) * n);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i)
      g.for_each_neighbor(t, i, [&](int j) {
        adj[static_cast<std::size_t>(t) * n + static_cast<std::size_t>(i)].push_back(j);
      });

  VariationalState best;
  int best_iters = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  const int restarts = (k == 1) ? 1 : cfg.restarts;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_stream(seed, {hash_tag("vbem-restart"), static_cast<std::uint64_t>(r)}));
    Eigen::MatrixXd tau0 = detail::vbem_initial_tau(g, k, cfg, r, rng, seed);
    detail::VbemRun run = detail::vbem_single_fit(g, k, cfg, std::move(tau0), adj);
    if (run.state.elbo_value > best_value) {
      best_value = run.state.elbo_value;
      best = std::move(run.state);
      best_iters = run.iters;
    }
  }

  LogEvidence ev;
  ev.value = best_value;
  ev.k = k;
  ev.engine = Engine::vbem;
  ev.iters = best_iters;
  ev.restarts_used = restarts;
  return {std::move(best), ev};
}

}  // namespace blockorder
