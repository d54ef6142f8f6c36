// Exact Krichevsky-Trofimov evidence at small scale.
//
// For a fixed label configuration the integral of the complete likelihood
// against the Dirichlet(1/2)/Beta(1/2,1/2) prior has a closed conjugate
// form: a Dirichlet-multinomial factor for the labels (or for each
// transition-count row in the dynamic model) times one Beta-function ratio
// per block pair and layer.  The evidence is then the sum of these masses
// over every configuration, accumulated with a streaming log-sum-exp while
// a mixed-radix odometer walks the configuration space and updates the
// sufficient statistics incrementally.

#pragma once

#include "blockorder/counts.hpp"
#include "blockorder/graph.hpp"
#include "blockorder/labels.hpp"
#include "blockorder/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockorder {

enum class Engine { exact, vbem };

inline const char* engine_name(Engine e) { return e == Engine::exact ? "exact" : "vbem"; }

struct LogEvidence {
  double value = 0.0;  // natural log of the (conditional) KT mass, <= 0
  int k = 1;
  Engine engine = Engine::exact;
  long long configs_enumerated = 0;  // exact engine
  int iters = 0;                     // vbem engine
  int restarts_used = 0;             // vbem engine
};

struct EnumerationBudgetError : std::runtime_error {
  double required;
  explicit EnumerationBudgetError(double required_, const std::string& what)
      : std::runtime_error(what), required(required_) {}
};

namespace detail {

inline double pow_ll(int base, long long exp) {
  double v = 1.0;
  for (long long e = 0; e < exp; ++e) {
    v *= base;
    if (v > 1e18) return v;  // far beyond any usable budget already
  }
  return v;
}

inline long long checked_config_count(int base, long long digits, double budget,
                                      const char* hint) {
  const double needed = pow_ll(base, digits);
  if (needed > budget)
    throw EnumerationBudgetError(
        needed, "exact evidence needs " + std::to_string(needed) +
                    " configurations but the budget is " + std::to_string(budget) + "; " + hint);
  return static_cast<long long>(needed);
}

// Incrementally maintained sufficient statistics for one labeling of a
// multi-layer collection.  Labels start at 0; move() relabels one node and
// patches group sizes and the per-layer symmetric edge-count matrices by
// scanning that node's neighbors.
class MlState {
 public:
  MlState(const GraphCollection& g, int k)
      : n_(g.n()), T_(g.layers()), k_(k), z_(static_cast<std::size_t>(n_), 0),
        sizes_(static_cast<std::size_t>(k), 0),
        o_(static_cast<std::size_t>(T_), std::vector<long long>(static_cast<std::size_t>(k) * k, 0)),
        adj_(static_cast<std::size_t>(T_) * n_) {
    sizes_[0] = n_;
    for (int t = 0; t < T_; ++t)
      for (int i = 0; i < n_; ++i) {
        auto& list = adj_[static_cast<std::size_t>(t) * n_ + i];
        g.for_each_neighbor(t, i, [&](int j) { list.push_back(j); });
        if (!list.empty()) o_[static_cast<std::size_t>(t)][0] += static_cast<long long>(list.size());
      }
    for (int t = 0; t < T_; ++t) o_[static_cast<std::size_t>(t)][0] /= 2;  // each edge seen twice
  }

  int n() const { return n_; }
  int k() const { return k_; }
  const std::vector<int>& labels() const { return z_; }
  int label(int i) const { return z_[static_cast<std::size_t>(i)]; }

  void move(int i, int to) {
    const int from = z_[static_cast<std::size_t>(i)];
    if (from == to) return;
    for (int t = 0; t < T_; ++t) {
      auto& o = o_[static_cast<std::size_t>(t)];
      for (int j : adj_[static_cast<std::size_t>(t) * n_ + i]) {
        const int c = z_[static_cast<std::size_t>(j)];
        o[static_cast<std::size_t>(from) * k_ + c] -= 1;
        if (from != c) o[static_cast<std::size_t>(c) * k_ + from] -= 1;
        o[static_cast<std::size_t>(to) * k_ + c] += 1;
        if (to != c) o[static_cast<std::size_t>(c) * k_ + to] += 1;
      }
    }
    sizes_[static_cast<std::size_t>(from)] -= 1;
    sizes_[static_cast<std::size_t>(to)] += 1;
    z_[static_cast<std::size_t>(i)] = to;
  }

  double log_complete_kt(const GammaTables& tables) const {
    double acc = tables.kt_dirichlet_term(sizes_, k_);
    for (int t = 0; t < T_; ++t) {
      const auto& o = o_[static_cast<std::size_t>(t)];
      for (int a = 0; a < k_; ++a) {
        acc += tables.kt_beta_term(o[static_cast<std::size_t>(a) * k_ + a],
                                   sizes_[static_cast<std::size_t>(a)] * (sizes_[static_cast<std::size_t>(a)] - 1) / 2);
        for (int b = a + 1; b < k_; ++b)
          acc += tables.kt_beta_term(o[static_cast<std::size_t>(a) * k_ + b],
                                     sizes_[static_cast<std::size_t>(a)] * sizes_[static_cast<std::size_t>(b)]);
      }
    }
    return acc;
  }

  double log_sup_complete(const GammaTables& tables) const {
    double acc = -tables.xlogx(n_);
    for (int a = 0; a < k_; ++a) acc += tables.xlogx(sizes_[static_cast<std::size_t>(a)]);
    for (int t = 0; t < T_; ++t) {
      const auto& o = o_[static_cast<std::size_t>(t)];
      for (int a = 0; a < k_; ++a) {
        acc += tables.sup_bernoulli_term(o[static_cast<std::size_t>(a) * k_ + a],
                                         sizes_[static_cast<std::size_t>(a)] * (sizes_[static_cast<std::size_t>(a)] - 1) / 2);
        for (int b = a + 1; b < k_; ++b)
          acc += tables.sup_bernoulli_term(o[static_cast<std::size_t>(a) * k_ + b],
                                           sizes_[static_cast<std::size_t>(a)] * sizes_[static_cast<std::size_t>(b)]);
      }
    }
    return acc;
  }

  void set_labels(const std::vector<int>& z) {
    for (int i = 0; i < n_; ++i) move(i, z[static_cast<std::size_t>(i)]);
  }

 private:
  int n_, T_, k_;
  std::vector<int> z_;
  std::vector<long long> sizes_;
  std::vector<std::vector<long long>> o_;  // per layer, k*k symmetric, diag = within count
  std::vector<std::vector<int>> adj_;
};

// Same idea for a label path: per-time sizes and edge counts plus the
// transition-count matrix; time slice 0 stays fixed (the conditioning
// configuration of the dynamic model).
class DynState {
 public:
  DynState(const GraphCollection& g, const LabelAssignment& z1, int k)
      : n_(g.n()), T_(g.layers()), k_(k),
        z_(static_cast<std::size_t>(T_), std::vector<int>(static_cast<std::size_t>(n_), 0)),
        sizes_(static_cast<std::size_t>(T_), std::vector<long long>(static_cast<std::size_t>(k), 0)),
        o_(static_cast<std::size_t>(T_), std::vector<long long>(static_cast<std::size_t>(k) * k, 0)),
        c_(static_cast<std::size_t>(k) * k, 0),
        adj_(static_cast<std::size_t>(T_) * n_) {
    if (z1.n() != n_) throw std::invalid_argument("DynState: z1 length mismatch");
    for (int t = 0; t < T_; ++t)
      for (int i = 0; i < n_; ++i) {
        auto& list = adj_[static_cast<std::size_t>(t) * n_ + i];
        g.for_each_neighbor(t, i, [&](int j) { list.push_back(j); });
      }
    // start with every movable label at 0, then install z1 in slice 0
    for (int t = 0; t < T_; ++t) {
      sizes_[static_cast<std::size_t>(t)][0] = n_;
      long long twice = 0;
      for (int i = 0; i < n_; ++i)
        twice += static_cast<long long>(adj_[static_cast<std::size_t>(t) * n_ + i].size());
      o_[static_cast<std::size_t>(t)][0] = twice / 2;
    }
    c_[0] = static_cast<long long>(n_) * (T_ - 1);
    for (int i = 0; i < n_; ++i) move(0, i, z1.labels[static_cast<std::size_t>(i)]);
  }

  int n() const { return n_; }
  int layers() const { return T_; }
  const std::vector<std::vector<int>>& path() const { return z_; }

  void move(int t, int i, int to) {
    auto& zt = z_[static_cast<std::size_t>(t)];
    const int from = zt[static_cast<std::size_t>(i)];
    if (from == to) return;
    auto& o = o_[static_cast<std::size_t>(t)];
    for (int j : adj_[static_cast<std::size_t>(t) * n_ + i]) {
      const int c = zt[static_cast<std::size_t>(j)];
      o[static_cast<std::size_t>(from) * k_ + c] -= 1;
      if (from != c) o[static_cast<std::size_t>(c) * k_ + from] -= 1;
      o[static_cast<std::size_t>(to) * k_ + c] += 1;
      if (to != c) o[static_cast<std::size_t>(c) * k_ + to] += 1;
    }
    auto& sizes = sizes_[static_cast<std::size_t>(t)];
    sizes[static_cast<std::size_t>(from)] -= 1;
    sizes[static_cast<std::size_t>(to)] += 1;
    if (t > 0) {
      const int prev = z_[static_cast<std::size_t>(t) - 1][static_cast<std::size_t>(i)];
      c_[static_cast<std::size_t>(prev) * k_ + from] -= 1;
      c_[static_cast<std::size_t>(prev) * k_ + to] += 1;
    }
    if (t + 1 < T_) {
      const int next = z_[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(i)];
      c_[static_cast<std::size_t>(from) * k_ + next] -= 1;
      c_[static_cast<std::size_t>(to) * k_ + next] += 1;
    }
    zt[static_cast<std::size_t>(i)] = to;
  }

  // Transition rows integrate against per-row Dirichlet(1/2) priors; the
  // diagonal connectivity is pooled over layers (P_aa does not depend on t)
  // while off-diagonal cells keep one Beta factor per layer.
  double log_complete_kt(const GammaTables& tables) const {
    double acc = 0.0;
    if (T_ > 1)
      for (int a = 0; a < k_; ++a)
        acc += tables.kt_dirichlet_term(c_.data() + static_cast<std::size_t>(a) * k_, k_);
    for (int a = 0; a < k_; ++a) {
      long long o_pool = 0, m_pool = 0;
      for (int t = 0; t < T_; ++t) {
        o_pool += o_[static_cast<std::size_t>(t)][static_cast<std::size_t>(a) * k_ + a];
        const long long na = sizes_[static_cast<std::size_t>(t)][static_cast<std::size_t>(a)];
        m_pool += na * (na - 1) / 2;
      }
      acc += tables.kt_beta_term(o_pool, m_pool);
    }
    for (int t = 0; t < T_; ++t) {
      const auto& sizes = sizes_[static_cast<std::size_t>(t)];
      const auto& o = o_[static_cast<std::size_t>(t)];
      for (int a = 0; a < k_; ++a)
        for (int b = a + 1; b < k_; ++b)
          acc += tables.kt_beta_term(o[static_cast<std::size_t>(a) * k_ + b],
                                     sizes[static_cast<std::size_t>(a)] * sizes[static_cast<std::size_t>(b)]);
    }
    return acc;
  }

  double log_sup_complete(const GammaTables& tables) const {
    double acc = 0.0;
    if (T_ > 1)
      for (int a = 0; a < k_; ++a) {
        long long row_total = 0;
        for (int b = 0; b < k_; ++b) {
          const long long cab = c_[static_cast<std::size_t>(a) * k_ + b];
          row_total += cab;
          acc += tables.xlogx(cab);
        }
        acc -= tables.xlogx(row_total);
      }
    for (int a = 0; a < k_; ++a) {
      long long o_pool = 0, m_pool = 0;
      for (int t = 0; t < T_; ++t) {
        o_pool += o_[static_cast<std::size_t>(t)][static_cast<std::size_t>(a) * k_ + a];
        const long long na = sizes_[static_cast<std::size_t>(t)][static_cast<std::size_t>(a)];
        m_pool += na * (na - 1) / 2;
      }
      acc += tables.sup_bernoulli_term(o_pool, m_pool);
    }
    for (int t = 0; t < T_; ++t) {
      const auto& sizes = sizes_[static_cast<std::size_t>(t)];
      const auto& o = o_[static_cast<std::size_t>(t)];
      for (int a = 0; a < k_; ++a)
        for (int b = a + 1; b < k_; ++b)
          acc += tables.sup_bernoulli_term(o[static_cast<std::size_t>(a) * k_ + b],
                                           sizes[static_cast<std::size_t>(a)] * sizes[static_cast<std::size_t>(b)]);
    }
    return acc;
  }

  void set_path(const LabelPath& zpath) {
    for (int t = 1; t < T_; ++t)
      for (int i = 0; i < n_; ++i)
        move(t, i, zpath.labels[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]);
  }

 private:
  int n_, T_, k_;
  std::vector<std::vector<int>> z_;
  std::vector<std::vector<long long>> sizes_;
  std::vector<std::vector<long long>> o_;
  std::vector<long long> c_;
  std::vector<std::vector<int>> adj_;
};

inline GammaTables ml_tables(const GraphCollection& g, int k) {
  const long long pairs = static_cast<long long>(g.n()) * (g.n() - 1) / 2;
  return GammaTables(static_cast<std::size_t>(std::max<long long>(pairs, g.n()) + k + 2));
}

inline GammaTables dyn_tables(const GraphCollection& g, int k) {
  const long long pooled = static_cast<long long>(g.layers()) * g.n() * (g.n() - 1) / 2;
  const long long trans = static_cast<long long>(g.n()) * g.layers();
  return GammaTables(static_cast<std::size_t>(std::max(pooled, trans) + k + 2));
}

// Walks all label vectors in lexicographic order (last digit fastest),
// calling visit() after each change; the state already reflects the current
// configuration when visit runs.
template <typename State, typename Visit>
void run_odometer(State& state, std::vector<int>& digits, int k,
                  const std::vector<std::pair<int, int>>& digit_slots, Visit&& visit) {
  visit();
  const int d = static_cast<int>(digits.size());
  for (;;) {
    int pos = d - 1;
    while (pos >= 0 && digits[static_cast<std::size_t>(pos)] == k - 1) {
      digits[static_cast<std::size_t>(pos)] = 0;
      const auto [t, i] = digit_slots[static_cast<std::size_t>(pos)];
      state.move(t, i, 0);
      --pos;
    }
    if (pos < 0) break;
    digits[static_cast<std::size_t>(pos)] += 1;
    const auto [t, i] = digit_slots[static_cast<std::size_t>(pos)];
    state.move(t, i, digits[static_cast<std::size_t>(pos)]);
    visit();
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fixed-configuration masses

inline double log_complete_kt_ml(const LabelAssignment& z, const GraphCollection& g, int k) {
  if (k < 1) throw std::invalid_argument("log_complete_kt_ml: k must be >= 1");
  LabelAssignment zk(k, z.labels);  // validates k >= max label
  detail::MlState state(g, k);
  state.set_labels(zk.labels);
  GammaTables tables = detail::ml_tables(g, k);
  return state.log_complete_kt(tables);
}

inline double log_complete_kt_dyn(const LabelPath& zpath, const GraphCollection& g, int k) {
  if (k < 1) throw std::invalid_argument("log_complete_kt_dyn: k must be >= 1");
  LabelPath zk(k, zpath.labels);
  detail::DynState state(g, zk.slice(0), k);
  state.set_path(zk);
  GammaTables tables = detail::dyn_tables(g, k);
  return state.log_complete_kt(tables);
}

// Complete-data likelihood maximized over the parameters (profile value).
inline double log_sup_complete_ml(const LabelAssignment& z, const GraphCollection& g, int k) {
  LabelAssignment zk(k, z.labels);
  detail::MlState state(g, k);
  state.set_labels(zk.labels);
  GammaTables tables = detail::ml_tables(g, k);
  return state.log_sup_complete(tables);
}

inline double log_sup_complete_dyn(const LabelPath& zpath, const GraphCollection& g, int k) {
  LabelPath zk(k, zpath.labels);
  detail::DynState state(g, zk.slice(0), k);
  state.set_path(zk);
  GammaTables tables = detail::dyn_tables(g, k);
  return state.log_sup_complete(tables);
}

// ---------------------------------------------------------------------------
// Exact evidence by enumeration

inline LogEvidence log_kt_ml_exact(const GraphCollection& g, int k, double budget = 1e7) {
  if (k < 1) throw std::invalid_argument("log_kt_ml_exact: k must be >= 1");
  const long long configs = detail::checked_config_count(
      k, g.n(), budget, "use the vbem engine for collections of this size");
  detail::MlState state(g, k);
  GammaTables tables = detail::ml_tables(g, k);
  LogSumExpAcc acc;
  std::vector<int> digits(static_cast<std::size_t>(g.n()), 0);
  std::vector<std::pair<int, int>> slots;
  slots.reserve(digits.size());
  for (int i = 0; i < g.n(); ++i) slots.emplace_back(0, i);
  struct MlMover {
    detail::MlState& s;
    void move(int, int i, int to) { s.move(i, to); }
  } mover{state};
  detail::run_odometer(mover, digits, k, slots,
                       [&] { acc.add(state.log_complete_kt(tables)); });
  LogEvidence ev;
  ev.value = acc.value();
  ev.k = k;
  ev.engine = Engine::exact;
  ev.configs_enumerated = configs;
  return ev;
}

inline LogEvidence log_kt_dyn_exact(const GraphCollection& g, const LabelAssignment& z1, int k,
                                    double budget = 1e7) {
  if (k < 1) throw std::invalid_argument("log_kt_dyn_exact: k must be >= 1");
  LabelAssignment z1k(k, z1.labels);
  const long long free_digits = static_cast<long long>(g.n()) * (g.layers() - 1);
  const long long configs = detail::checked_config_count(
      k, free_digits, budget, "reduce n, T or k for the dynamic exact engine");
  detail::DynState state(g, z1k, k);
  GammaTables tables = detail::dyn_tables(g, k);
  LogSumExpAcc acc;
  std::vector<int> digits(static_cast<std::size_t>(free_digits), 0);
  std::vector<std::pair<int, int>> slots;
  slots.reserve(digits.size());
  for (int t = 1; t < g.layers(); ++t)
    for (int i = 0; i < g.n(); ++i) slots.emplace_back(t, i);
  detail::run_odometer(state, digits, k, slots,
                       [&] { acc.add(state.log_complete_kt(tables)); });
  LogEvidence ev;
  ev.value = acc.value();
  ev.k = k;
  ev.engine = Engine::exact;
  ev.configs_enumerated = configs;
  return ev;
}

// ---------------------------------------------------------------------------
// Profile labelings (argmax of the complete-data likelihood); ties go to the
// lexicographically smallest configuration.

inline LabelAssignment profile_labels_ml(const GraphCollection& g, int k, double budget = 1e7) {
  if (k < 1) throw std::invalid_argument("profile_labels_ml: k must be >= 1");
  detail::checked_config_count(k, g.n(), budget, "profile enumeration over labelings");
  detail::MlState state(g, k);
  GammaTables tables = detail::ml_tables(g, k);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_z(static_cast<std::size_t>(g.n()), 0);
  std::vector<int> digits(static_cast<std::size_t>(g.n()), 0);
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < g.n(); ++i) slots.emplace_back(0, i);
  struct MlMover {
    detail::MlState& s;
    void move(int, int i, int to) { s.move(i, to); }
  } mover{state};
  detail::run_odometer(mover, digits, k, slots, [&] {
    const double v = state.log_sup_complete(tables);
    if (v > best) {
      best = v;
      best_z = state.labels();
    }
  });
  return LabelAssignment(k, std::move(best_z));
}

inline LabelPath profile_labels_dyn(const GraphCollection& g, const LabelAssignment& z1, int k,
                                    double budget = 1e7) {
  if (k < 1) throw std::invalid_argument("profile_labels_dyn: k must be >= 1");
  LabelAssignment z1k(k, z1.labels);
  const long long free_digits = static_cast<long long>(g.n()) * (g.layers() - 1);
  detail::checked_config_count(k, free_digits, budget, "profile enumeration over label paths");
  detail::DynState state(g, z1k, k);
  GammaTables tables = detail::dyn_tables(g, k);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> best_path = state.path();
  std::vector<int> digits(static_cast<std::size_t>(free_digits), 0);
  std::vector<std::pair<int, int>> slots;
  for (int t = 1; t < g.layers(); ++t)
    for (int i = 0; i < g.n(); ++i) slots.emplace_back(t, i);
  detail::run_odometer(state, digits, k, slots, [&] {
    const double v = state.log_sup_complete(tables);
    if (v > best) {
      best = v;
      best_path = state.path();
    }
  });
  return LabelPath(k, std::move(best_path));
}

// ---------------------------------------------------------------------------
// Per-configuration sandwich of the uniform likelihood bound: the gap
// log sup - log KT together with the proved upper bound for it.

struct Prop1Gap {
  double gap;
  double bound;
};

inline double prop1_bound_ml(int k, long long n, int T) {
  const double dk = k, dT = T;
  return (dT * dk * (dk + 1.0) + dk - 1.0) / 2.0 * std::log(static_cast<double>(n)) +
         (dT * dk * (dk + 1.0) + 1.0);
}

inline double prop1_bound_dyn(int k, long long n, int T) {
  const double dk = k, dT = T, dn = static_cast<double>(n);
  const double c_kT = dk / (3.0 * dT) * (dk * (dk - 1.0) + 2.0) + dT * dk * (dk - 1.0) + 2.0 * dk;
  return dk / 2.0 * std::log(dn * dn * dT) + dk * (dk - 1.0) / 2.0 * std::log(dn * dT) +
         dT * dk * (dk - 1.0) / 2.0 * std::log(dn) + c_kT;
}

inline Prop1Gap prop1_gap_ml(const LabelAssignment& z, const GraphCollection& g, int k) {
  const double gap = log_sup_complete_ml(z, g, k) - log_complete_kt_ml(z, g, k);
  return {gap, prop1_bound_ml(k, g.n(), g.layers())};
}

inline Prop1Gap prop1_gap_dyn(const LabelPath& zpath, const GraphCollection& g, int k) {
  const double gap = log_sup_complete_dyn(zpath, g, k) - log_complete_kt_dyn(zpath, g, k);
  return {gap, prop1_bound_dyn(k, g.n(), g.layers())};
}

}  // namespace blockorder
