// Acceptance suite: every release-gating property and quantitative target in
// one binary, one pass/fail line per criterion.  Run it with no arguments for
// the full gate or with a criterion number to run a single one.

#include "blockorder/blockorder.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace blockorder;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::ostream&)> run;
};

GraphCollection random_graph(int n, int T, double p, Rng& rng) {
  GraphCollection g(n, T);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.bernoulli(p)) g.set_edge(t, i, j, true);
  return g;
}

std::vector<GraphCollection> all_graphs(int n, int T) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const int bits = static_cast<int>(pairs.size()) * T;
  std::vector<GraphCollection> out;
  for (long long mask = 0; mask < (1LL << bits); ++mask) {
    GraphCollection g(n, T);
    for (int b = 0; b < bits; ++b)
      if ((mask >> b) & 1) {
        const int t = b / static_cast<int>(pairs.size());
        const auto [i, j] = pairs[static_cast<std::size_t>(b % static_cast<int>(pairs.size()))];
        g.set_edge(t, i, j, true);
      }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<int> unrank_labels(long long rank, int n, int k) {
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    z[static_cast<std::size_t>(i)] = static_cast<int>(rank % k);
    rank /= k;
  }
  return z;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. evidence normalization at enumeration scale
bool criterion_normalization(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  for (int T : {1, 2})
    for (int k : {1, 2, 3}) {
      LogSumExpAcc acc;
      for (const auto& g : all_graphs(3, T)) acc.add(log_kt_ml_exact(g, k).value);
      const double total = std::exp(acc.value());
      if (std::abs(total - 1.0) > 1e-10) {
        log << "  ml normalization off at T=" << T << " k=" << k << ": " << total << "\n";
        ok = false;
      }
    }
  for (long long z1_rank = 0; z1_rank < 4; ++z1_rank) {
    const LabelAssignment z1(2, unrank_labels(z1_rank, 2, 2));
    LogSumExpAcc acc;
    for (const auto& g : all_graphs(2, 2)) acc.add(log_kt_dyn_exact(g, z1, 2).value);
    const double total = std::exp(acc.value());
    if (std::abs(total - 1.0) > 1e-10) {
      log << "  dyn normalization off for z1 rank " << z1_rank << ": " << total << "\n";
      ok = false;
    }
  }
  const double elapsed = seconds_since(start);
  log << "  elapsed " << elapsed << " s (budget 10 s)\n";
  return ok && elapsed < 10.0;
}

// 2. uniform-bound sandwich on random tiny instances, every configuration
bool criterion_prop1(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(hash_tag("prop1-acceptance"));
  long long checked = 0, violations = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const bool dynamic = inst % 2 == 1;
    const int k = 1 + static_cast<int>(rng.below(3));
    const int n = std::max(k, 2) + static_cast<int>(rng.below(static_cast<std::uint64_t>(5 - std::max(k, 2) + 1)));
    const int T = 1 + static_cast<int>(rng.below(2));
    const double p = rng.uniform(0.2, 0.8);
    const GraphCollection g = random_graph(n, T, p, rng);
    if (!dynamic) {
      for (long long r = 0; r < detail::pow_ll(k, n); ++r) {
        const LabelAssignment z(k, unrank_labels(r, n, k));
        const Prop1Gap gap = prop1_gap_ml(z, g, k);
        ++checked;
        if (gap.gap < -1e-10 || gap.gap > gap.bound) {
          ++violations;
          if (violations < 4)
            log << "  ml violation n=" << n << " T=" << T << " k=" << k << " gap=" << gap.gap
                << " bound=" << gap.bound << "\n";
        }
      }
    } else {
      const long long per_slice = static_cast<long long>(detail::pow_ll(k, n));
      for (long long r = 0; r < static_cast<long long>(detail::pow_ll(k, static_cast<long long>(n) * T)); ++r) {
        std::vector<std::vector<int>> slices;
        long long rest = r;
        for (int t = 0; t < T; ++t) {
          slices.push_back(unrank_labels(rest % per_slice, n, k));
          rest /= per_slice;
        }
        const LabelPath path(k, std::move(slices));
        const Prop1Gap gap = prop1_gap_dyn(path, g, k);
        ++checked;
        if (gap.gap < -1e-10 || gap.gap > gap.bound) {
          ++violations;
          if (violations < 4)
            log << "  dyn violation n=" << n << " T=" << T << " k=" << k << " gap=" << gap.gap
                << " bound=" << gap.bound << "\n";
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  log << "  " << checked << " configurations, " << violations << " violations, elapsed "
      << elapsed << " s (budget 60 s)\n";
  return violations == 0 && elapsed < 60.0;
}

// 3. variational bound below the exact evidence, monotone sweeps
bool criterion_vbem_bound(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(hash_tag("vbem-acceptance"));
  bool ok = true;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const int k = 1 + static_cast<int>(rng.below(2));
    const int T = 1 + static_cast<int>(rng.below(2));
    const GraphCollection g = random_graph(n, T, rng.uniform(0.2, 0.8), rng);
    const double exact = log_kt_ml_exact(g, k).value;
    VbemConfig cfg;
    cfg.restarts = 3;
    const auto [state, ev] = vbem_fit(g, k, cfg, rng.next_u64());
    if (ev.value > exact + 1e-9) {
      log << "  bound above exact at instance " << inst << ": " << ev.value << " > " << exact << "\n";
      ok = false;
    }
    for (std::size_t s = 1; s < state.sweep_elbos.size(); ++s)
      if (state.sweep_elbos[s] < state.sweep_elbos[s - 1] - 1e-9) {
        log << "  non-monotone sweep at instance " << inst << " sweep " << s << "\n";
        ok = false;
      }
  }
  const double elapsed = seconds_since(start);
  log << "  elapsed " << elapsed << " s (budget 120 s)\n";
  return ok && elapsed < 120.0;
}

// 4. penalty arithmetic pinned to the closed forms
bool criterion_penalty(std::ostream& log) {
  bool ok = true;
  for (long long n : {10LL, 100LL, 1000LL})
    for (int T : {1, 5}) {
      if (pen_ml(1, n, T) != 0.0 || pen_dyn(1, n, T) != 0.0) {
        log << "  nonzero penalty at k=1\n";
        ok = false;
      }
      for (int k = 1; k < 15; ++k)
        if (!(pen_ml(k + 1, n, T) > pen_ml(k, n, T)) ||
            !(pen_dyn(k + 1, n, T) > pen_dyn(k, n, T))) {
          log << "  monotonicity failure at k=" << k << " n=" << n << " T=" << T << "\n";
          ok = false;
        }
    }
  const double hand = ((5.0 * 1.0 * 2.0 + 1.0 - 1.0) / 2.0 + 1.0 + 0.01) * std::log(100.0);
  const double got = pen_ml(2, 100, 5, PenaltyConfig{0.01});
  if (std::abs(got - hand) > 1e-9) {
    log << "  pen_ml(2,100,5,0.01) = " << got << " vs hand value " << hand << "\n";
    ok = false;
  }
  return ok;
}

// helper for criteria 5 and 6
struct Cell {
  double accuracy = -1.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  int errors = 0;
};

Cell find_cell(const ExperimentResult& result, int n, double rho) {
  for (const auto& row : result.summary)
    if (row.n == n && (rho < 0.0 ? row.rho < 0.0 : std::abs(row.rho - rho) < 1e-12) &&
        row.method == "kt")
      return {row.accuracy, row.wilson_lo, row.wilson_hi, row.errors};
  return {};
}

// 5. desk-scale consistency on the six-community scenario
bool criterion_fig1_accuracy(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.scenario = "fig1";
  cfg.n_grid = {100, 300};
  cfg.T = 5;
  cfg.replications = 20;
  cfg.k_max = 15;
  cfg.engine = "vbem";
  cfg.methods = {"kt"};
  cfg.master_seed = hash_tag("fig1-acceptance");
  const ExperimentResult result = run_experiment(cfg);
  const Cell at100 = find_cell(result, 100, -1.0);
  const Cell at300 = find_cell(result, 300, -1.0);
  log << "  accuracy n=100: " << at100.accuracy << "  n=300: " << at300.accuracy
      << "  (wilson at n=100: [" << at100.wilson_lo << ", " << at100.wilson_hi << "])\n";
  log << "  elapsed " << seconds_since(start) << " s (target 1800 s)\n";
  if (at100.errors + at300.errors > 0) {
    log << "  " << (at100.errors + at300.errors) << " replication errors\n";
    return false;
  }
  // >= 0.9 at n=300 and nondecreasing within one Wilson interval
  return at300.accuracy >= 0.9 && at300.accuracy >= at100.wilson_lo;
}

// 6. sparse-regime detection-threshold shape
bool criterion_sparse_accuracy(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.scenario = "sparse_table1";
  cfg.n_grid = {300};
  cfg.T = 4;
  cfg.replications = 20;
  cfg.k_max = 15;
  cfg.engine = "vbem";
  cfg.methods = {"kt"};
  cfg.rho_grid = {0.05, 0.35};
  cfg.master_seed = hash_tag("sparse-acceptance");
  const ExperimentResult result = run_experiment(cfg);
  const Cell dense = find_cell(result, 300, 0.35);
  const Cell sparse = find_cell(result, 300, 0.05);
  log << "  accuracy rho=0.35: " << dense.accuracy << "  rho=0.05: " << sparse.accuracy << "\n";
  log << "  elapsed " << seconds_since(start) << " s\n";
  if (dense.errors + sparse.errors > 0) return false;
  return dense.accuracy >= 0.9 && sparse.accuracy <= 0.3;
}

// 7. exact-engine certainties on planted structure
bool criterion_planted(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  int clique_hits = 0, empty_hits = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    // two 4-cliques over two layers, nodes shuffled by the seed
    GraphCollection g(8, 2);
    for (int t = 0; t < 2; ++t)
      for (int c = 0; c < 2; ++c)
        for (int i = 4 * c; i < 4 * (c + 1); ++i)
          for (int j = i + 1; j < 4 * (c + 1); ++j) g.set_edge(t, i, j, true);
    Rng rng(derive_stream(hash_tag("planted-acceptance"), {static_cast<std::uint64_t>(s)}));
    std::vector<int> perm{0, 1, 2, 3, 4, 5, 6, 7};
    for (int i = 7; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
    const SelectionReport rep =
        select_k_ml(g.permuted(perm), 4, {}, SelectEngine::exact, static_cast<std::uint64_t>(s));
    if (rep.k_hat == 2) ++clique_hits;

    const GraphCollection empty(6, 2);
    const SelectionReport rep_empty =
        select_k_ml(empty, 4, {}, SelectEngine::exact, static_cast<std::uint64_t>(s));
    if (rep_empty.k_hat == 1) ++empty_hits;
  }
  log << "  cliques: " << clique_hits << "/" << seeds << "  empty: " << empty_hits << "/" << seeds
      << "  elapsed " << seconds_since(start) << " s\n";
  return clique_hits == seeds && empty_hits == seeds;
}

// 8. byte-identical experiment reruns
bool criterion_determinism(std::ostream& log) {
  namespace fs = std::filesystem;
  ExperimentConfig cfg;
  cfg.scenario = "fig1";
  cfg.n_grid = {30};
  cfg.T = 2;
  cfg.replications = 2;
  cfg.k_max = 3;
  cfg.engine = "vbem";
  cfg.methods = {"kt", "bhmc"};
  cfg.master_seed = 99991;
  cfg.vbem.restarts = 2;
  cfg.threads = 2;
  run_experiment_to_dir(cfg, "acceptance_det_a");
  run_experiment_to_dir(cfg, "acceptance_det_b");
  const bool same = read_file("acceptance_det_a/records.csv") == read_file("acceptance_det_b/records.csv");
  fs::remove_all("acceptance_det_a");
  fs::remove_all("acceptance_det_b");
  if (!same) log << "  records.csv differ between identical runs\n";
  return same;
}

// 9. sampler statistics inside 4-sigma binomial envelopes
bool criterion_sampler_stats(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  int cells = 0, passes = 0;

  // multi-layer: n=10000, pooled per-block edge frequencies and class counts
  MlParams params;
  params.pi = Eigen::Vector2d(0.5, 0.5);
  Eigen::MatrixXd P(2, 2);
  P << 0.8, 0.1, 0.1, 0.8;
  params.P = {P};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto [z, g] = sample_mlsbm(10000, params, derive_stream(hash_tag("stats-ml"), {seed}));
    const BlockCounts c = block_counts(z, g);
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        const double m = static_cast<double>(c.pairs(0)(a, b));
        const double freq = static_cast<double>(c.edge_counts[0](a, b)) / m;
        const double se = std::sqrt(P(a, b) * (1.0 - P(a, b)) / m);
        ++cells;
        if (std::abs(freq - P(a, b)) <= 4.0 * se) ++passes;
      }
    const auto counts = z.class_counts();
    for (int a = 0; a < 2; ++a) {
      const double dev = std::abs(static_cast<double>(counts[static_cast<std::size_t>(a)]) / 10000.0 - 0.5);
      ++cells;
      if (dev <= 4.0 * std::sqrt(0.25 / 10000.0)) ++passes;
    }
  }

  // dynamic: n=500, T=10, transition rows and per-time marginals
  Eigen::MatrixXd trans(2, 2);
  trans << 0.85, 0.15, 0.25, 0.75;
  std::vector<Eigen::MatrixXd> DP(10, Eigen::MatrixXd::Constant(2, 2, 0.02));
  for (auto& m : DP) { m(0, 0) = 0.05; m(1, 1) = 0.05; }
  const DynParams dyn(trans, DP);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto [path, g] = sample_dynsbm(500, dyn, derive_stream(hash_tag("stats-dyn"), {seed}));
    const BlockCounts c = block_counts(path, g);
    for (int a = 0; a < 2; ++a) {
      const double row = static_cast<double>(c.transitions(a, 0) + c.transitions(a, 1));
      for (int b = 0; b < 2; ++b) {
        const double hat = static_cast<double>(c.transitions(a, b)) / row;
        const double se = std::sqrt(trans(a, b) * (1.0 - trans(a, b)) / row);
        ++cells;
        if (std::abs(hat - trans(a, b)) <= 4.0 * se) ++passes;
      }
    }
    for (int t = 0; t < 10; ++t)
      for (int a = 0; a < 2; ++a) {
        const double hat = static_cast<double>(c.sizes(t)(a)) / 500.0;
        const double se = std::sqrt(dyn.alpha(a) * (1.0 - dyn.alpha(a)) / 500.0);
        ++cells;
        if (std::abs(hat - dyn.alpha(a)) <= 4.0 * se) ++passes;
      }
  }

  const double rate = static_cast<double>(passes) / cells;
  log << "  " << passes << "/" << cells << " cells inside the envelope (" << rate * 100.0
      << "%), elapsed " << seconds_since(start) << " s\n";
  return rate >= 0.99;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "evidence normalization (exact engines)", criterion_normalization},
      {2, "uniform likelihood bound sandwich", criterion_prop1},
      {3, "variational lower bound and monotonicity", criterion_vbem_bound},
      {4, "penalty arithmetic", criterion_penalty},
      {5, "six-community accuracy at desk scale", criterion_fig1_accuracy},
      {6, "sparse-regime detection threshold", criterion_sparse_accuracy},
      {7, "planted-structure exact selection", criterion_planted},
      {8, "experiment determinism", criterion_determinism},
      {9, "sampler statistics", criterion_sampler_stats},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::ostringstream log;
    bool ok = false;
    try {
      ok = c.run(log);
    } catch (const std::exception& e) {
      log << "  exception: " << e.what() << "\n";
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name << "\n"
              << log.str();
    std::cout.flush();
    if (!ok) ++failed;
  }
  if (failed > 0) std::cout << failed << " criterion(s) failed\n";
  return failed == 0 ? 0 : 1;
}
