// Config-driven Monte-Carlo experiment runner.
//
// A run is a grid of (n, T, rho) points times a number of replications.
// Every replication samples one collection and hands it to each requested
// method; per-method RNG streams are derived from the master seed together
// with the grid point, the replication index and the method name, so adding
// a method never shifts the draws of another one.  Records are written in a
// canonical order (grid point, replication, method, layer) regardless of the
// worker pool schedule, which makes records.csv byte-identical across runs
// with the same config; wall-clock timings go to a separate timings.csv.

#pragma once

#include "blockorder/scenarios.hpp"
#include "blockorder/select.hpp"
#include "blockorder/spectral.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace blockorder {

inline constexpr int kRecordsSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

struct ExperimentConfig {
  std::string scenario = "fig1";  // fig1 | sparse_table1 | rate_study | custom
  std::vector<int> n_grid;
  int T = 5;
  int replications = 20;
  int k_max = 15;
  double epsilon = 1e-3;
  std::vector<std::string> methods = {"kt"};
  std::string engine = "auto";  // engine for kt / layerwise_kt
  std::uint64_t master_seed = 20240101;
  int threads = 1;
  VbemConfig vbem;
  double exact_budget = 1e7;

  std::vector<double> rho_grid;      // sparse_table1
  std::string rate_design = "n2t_const";  // rate_study: nt_const | n2t_const
  std::vector<int> rate_n1_grid;     // rate_study: n at T = 1 per column
  std::vector<int> rate_T_grid = {1, 4, 9, 16};

  njson custom_params;  // custom scenario: {"model":"ml","params":{...},"k_true":...}
  int custom_k_true = 0;

  void validate() const {
    if (replications < 0) throw std::invalid_argument("ExperimentConfig: replications < 0");
    if (k_max < 1) throw std::invalid_argument("ExperimentConfig: k_max < 1");
    if (methods.empty()) throw std::invalid_argument("ExperimentConfig: no methods requested");
    if (!(epsilon > 0.0)) throw std::invalid_argument("ExperimentConfig: epsilon must be positive");
  }
};

struct AccuracyRecord {
  std::string scenario;
  int n = 0;
  int T = 0;
  double rho = -1.0;  // -1 when the scenario has no sparsity scale
  std::string method;
  int replication = 0;
  int layer = -1;     // -1 for pooled methods, the layer index otherwise
  int k_hat = 0;
  int k_true = 0;
  int correct = 0;
  int error = 0;
  double wall_time_ms = 0.0;
};

struct ExperimentSummaryRow {
  std::string scenario;
  int n = 0;
  int T = 0;
  double rho = -1.0;
  std::string method;
  int records = 0;
  int errors = 0;
  double accuracy = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
};

struct ExperimentResult {
  std::vector<AccuracyRecord> records;
  std::vector<ExperimentSummaryRow> summary;
};

namespace detail {

struct GridPoint {
  int n;
  int T;
  double rho;  // < 0 when unused
  int k_true;
};

inline std::vector<GridPoint> build_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> grid;
  if (cfg.scenario == "fig1") {
    std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{50, 100, 200, 300} : cfg.n_grid;
    for (int n : ns) grid.push_back({n, cfg.T, -1.0, 6});
  } else if (cfg.scenario == "sparse_table1") {
    std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{300} : cfg.n_grid;
    std::vector<double> rhos =
        cfg.rho_grid.empty() ? std::vector<double>{0.05, 0.15, 0.25, 0.35, 0.45} : cfg.rho_grid;
    for (int n : ns)
      for (double rho : rhos) grid.push_back({n, cfg.T, rho, 3});
  } else if (cfg.scenario == "rate_study") {
    std::vector<int> n1s = cfg.rate_n1_grid.empty() ? std::vector<int>{72, 144, 216}
                                                    : cfg.rate_n1_grid;
    for (int n1 : n1s)
      for (int T : cfg.rate_T_grid) {
        int n;
        if (cfg.rate_design == "nt_const")
          n = std::max(4, static_cast<int>(std::lround(static_cast<double>(n1) / T)));
        else if (cfg.rate_design == "n2t_const")
          n = std::max(4, static_cast<int>(std::lround(n1 / std::sqrt(static_cast<double>(T)))));
        else
          throw std::invalid_argument("rate_study: unknown design " + cfg.rate_design);
        grid.push_back({n, T, -1.0, 2});
      }
  } else if (cfg.scenario == "custom") {
    std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{100} : cfg.n_grid;
    for (int n : ns) grid.push_back({n, cfg.T, -1.0, cfg.custom_k_true});
  } else {
    throw std::invalid_argument("unknown scenario: " + cfg.scenario);
  }
  return grid;
}

inline std::uint64_t rho_bits(double rho) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(rho));
  std::memcpy(&bits, &rho, sizeof(bits));
  return bits;
}

inline std::uint64_t task_stream(const ExperimentConfig& cfg, const GridPoint& gp, int rep,
                                 const char* purpose) {
  return derive_stream(cfg.master_seed,
                       {hash_tag(cfg.scenario), static_cast<std::uint64_t>(gp.n),
                        static_cast<std::uint64_t>(gp.T), rho_bits(gp.rho),
                        static_cast<std::uint64_t>(rep), hash_tag(purpose)});
}

inline MlScenarioDraw draw_collection(const ExperimentConfig& cfg, const GridPoint& gp,
                                      std::uint64_t data_seed) {
  if (cfg.scenario == "fig1") return scenario_fig1(gp.n, data_seed, gp.T);
  if (cfg.scenario == "sparse_table1") return scenario_sparse_table1(gp.n, gp.rho, data_seed, gp.T);
  if (cfg.scenario == "rate_study") return scenario_rate(gp.n, gp.T, data_seed);
  // custom: fixed parameters from the config
  MlParams params = ml_params_from_json(cfg.custom_params.at("params"));
  auto [labels, graphs] = sample_mlsbm(gp.n, params, data_seed);
  return MlScenarioDraw{std::move(params), std::move(labels), std::move(graphs), cfg.custom_k_true};
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

inline std::string format_rho(double rho) {
  if (rho < 0.0) return "";
  std::ostringstream out;
  out.precision(6);
  out << rho;
  return out.str();
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<detail::GridPoint> grid = detail::build_grid(cfg);
  const SelectEngine engine = select_engine_from_name(cfg.engine);

  SelectionConfig scfg;
  scfg.penalty.epsilon = cfg.epsilon;
  scfg.vbem = cfg.vbem;
  scfg.exact_budget = cfg.exact_budget;

  struct Task {
    const detail::GridPoint* gp;
    int rep;
  };
  std::vector<Task> tasks;
  for (const auto& gp : grid)
    for (int rep = 0; rep < cfg.replications; ++rep) tasks.push_back({&gp, rep});

  std::vector<std::vector<AccuracyRecord>> per_task(tasks.size());
  detail::parallel_for(tasks.size(), cfg.threads, [&](std::size_t ti) {
    const auto& [gp_ptr, rep] = tasks[ti];
    const detail::GridPoint& gp = *gp_ptr;
    const MlScenarioDraw draw =
        detail::draw_collection(cfg, gp, detail::task_stream(cfg, gp, rep, "data"));

    auto& out = per_task[ti];
    for (const std::string& method : cfg.methods) {
      const std::uint64_t mseed = detail::task_stream(cfg, gp, rep, method.c_str());
      AccuracyRecord base;
      base.scenario = cfg.scenario;
      base.n = gp.n;
      base.T = gp.T;
      base.rho = gp.rho;
      base.method = method;
      base.replication = rep;
      base.k_true = gp.k_true;

      // the sweep bound defaults to min(n, k_max)
      const int k_max = std::min(cfg.k_max, gp.n);
      const auto started = std::chrono::steady_clock::now();
      try {
        if (method == "kt") {
          const SelectionReport rep_kt = select_k_ml(draw.graphs, k_max, scfg, engine, mseed);
          AccuracyRecord r = base;
          r.k_hat = rep_kt.k_hat;
          r.correct = (r.k_hat == r.k_true) ? 1 : 0;
          r.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - started).count();
          out.push_back(std::move(r));
        } else if (method == "layerwise_kt") {
          const int k_hat = layerwise_max_baseline(draw.graphs, k_max, scfg, engine, mseed);
          AccuracyRecord r = base;
          r.k_hat = k_hat;
          r.correct = (k_hat == r.k_true) ? 1 : 0;
          r.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - started).count();
          out.push_back(std::move(r));
        } else if (method == "bhmc") {
          // per-layer estimator: one record per layer, fractional accounting
          for (int t = 0; t < draw.graphs.layers(); ++t) {
            const auto layer_start = std::chrono::steady_clock::now();
            const BhmcResult b = bhmc_select(draw.graphs, t, k_max);
            AccuracyRecord r = base;
            r.layer = t;
            r.k_hat = b.k_selected;
            r.correct = (r.k_hat == r.k_true) ? 1 : 0;
            r.wall_time_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - layer_start).count();
            out.push_back(std::move(r));
          }
        } else {
          throw std::invalid_argument("unknown method: " + method);
        }
      } catch (const std::exception&) {
        AccuracyRecord r = base;
        r.k_hat = -1;
        r.error = 1;
        r.wall_time_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - started).count();
        out.push_back(std::move(r));
      }
    }
  });

  ExperimentResult result;
  for (auto& lst : per_task)
    for (auto& r : lst) result.records.push_back(std::move(r));

  // summary per (grid point, method), in grid order
  for (const auto& gp : grid)
    for (const std::string& method : cfg.methods) {
      ExperimentSummaryRow row;
      row.scenario = cfg.scenario;
      row.n = gp.n;
      row.T = gp.T;
      row.rho = gp.rho;
      row.method = method;
      double hits = 0.0;
      for (const auto& r : result.records) {
        if (r.n != gp.n || r.T != gp.T || r.rho != gp.rho || r.method != method) continue;
        ++row.records;
        row.errors += r.error;
        hits += r.correct;
      }
      if (row.records == 0) continue;  // nothing ran for this cell
      row.accuracy = hits / row.records;
      const WilsonInterval wi = wilson_interval(hits, row.records);
      row.wilson_lo = wi.lo;
      row.wilson_hi = wi.hi;
      result.summary.push_back(std::move(row));
    }
  return result;
}

// ---------------------------------------------------------------------------
// CSV / manifest output

inline std::string records_to_csv(const std::vector<AccuracyRecord>& records) {
  std::ostringstream out;
  out << "# schema_version=" << kRecordsSchemaVersion << '\n';
  out << "scenario,n,T,rho,method,replication,layer,k_hat,k_true,correct,error\n";
  for (const auto& r : records)
    out << r.scenario << ',' << r.n << ',' << r.T << ',' << detail::format_rho(r.rho) << ','
        << r.method << ',' << r.replication << ',' << r.layer << ',' << r.k_hat << ','
        << r.k_true << ',' << r.correct << ',' << r.error << '\n';
  return out.str();
}

inline std::string timings_to_csv(const std::vector<AccuracyRecord>& records) {
  std::ostringstream out;
  out << "# schema_version=" << kRecordsSchemaVersion << '\n';
  out << "scenario,n,T,rho,method,replication,layer,wall_time_ms\n";
  out.setf(std::ios::fixed);
  out.precision(3);
  for (const auto& r : records)
    out << r.scenario << ',' << r.n << ',' << r.T << ',' << detail::format_rho(r.rho) << ','
        << r.method << ',' << r.replication << ',' << r.layer << ',' << r.wall_time_ms << '\n';
  return out.str();
}

inline std::string summary_to_csv(const std::vector<ExperimentSummaryRow>& summary) {
  std::ostringstream out;
  out << "# schema_version=" << kRecordsSchemaVersion << '\n';
  out << "scenario,n,T,rho,method,records,errors,accuracy,wilson_lo,wilson_hi\n";
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const auto& row : summary)
    out << row.scenario << ',' << row.n << ',' << row.T << ',' << detail::format_rho(row.rho)
        << ',' << row.method << ',' << row.records << ',' << row.errors << ',' << row.accuracy
        << ',' << row.wilson_lo << ',' << row.wilson_hi << '\n';
  return out.str();
}

inline njson experiment_config_to_json(const ExperimentConfig& cfg) {
  njson j{{"scenario", cfg.scenario},
          {"n_grid", cfg.n_grid},
          {"T", cfg.T},
          {"replications", cfg.replications},
          {"k_max", cfg.k_max},
          {"epsilon", cfg.epsilon},
          {"methods", cfg.methods},
          {"engine", cfg.engine},
          {"master_seed", cfg.master_seed},
          {"threads", cfg.threads},
          {"exact_budget", cfg.exact_budget},
          {"vbem", njson{{"max_iters", cfg.vbem.max_iters},
                         {"tol", cfg.vbem.tol},
                         {"restarts", cfg.vbem.restarts},
                         {"init", cfg.vbem.init == VbemConfig::Init::spectral ? "spectral" : "random"}}}};
  if (cfg.scenario == "sparse_table1") j["rho_grid"] = cfg.rho_grid;
  if (cfg.scenario == "rate_study") {
    j["rate_design"] = cfg.rate_design;
    j["rate_n1_grid"] = cfg.rate_n1_grid;
    j["rate_T_grid"] = cfg.rate_T_grid;
  }
  if (cfg.scenario == "custom") {
    j["custom"] = cfg.custom_params;
    j["custom_k_true"] = cfg.custom_k_true;
  }
  return j;
}

inline ExperimentConfig experiment_config_from_json(const njson& j) {
  ExperimentConfig cfg;
  if (j.contains("scenario")) cfg.scenario = j.at("scenario").get<std::string>();
  if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
  if (j.contains("T")) cfg.T = j.at("T").get<int>();
  if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
  if (j.contains("k_max")) cfg.k_max = j.at("k_max").get<int>();
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("engine")) cfg.engine = j.at("engine").get<std::string>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("exact_budget")) cfg.exact_budget = j.at("exact_budget").get<double>();
  if (j.contains("rho_grid")) cfg.rho_grid = j.at("rho_grid").get<std::vector<double>>();
  if (j.contains("rate_design")) cfg.rate_design = j.at("rate_design").get<std::string>();
  if (j.contains("rate_n1_grid")) cfg.rate_n1_grid = j.at("rate_n1_grid").get<std::vector<int>>();
  if (j.contains("rate_T_grid")) cfg.rate_T_grid = j.at("rate_T_grid").get<std::vector<int>>();
  if (j.contains("custom")) cfg.custom_params = j.at("custom");
  if (j.contains("custom_k_true")) cfg.custom_k_true = j.at("custom_k_true").get<int>();
  if (j.contains("vbem")) {
    const auto& v = j.at("vbem");
    if (v.contains("max_iters")) cfg.vbem.max_iters = v.at("max_iters").get<int>();
    if (v.contains("tol")) cfg.vbem.tol = v.at("tol").get<double>();
    if (v.contains("restarts")) cfg.vbem.restarts = v.at("restarts").get<int>();
    if (v.contains("init"))
      cfg.vbem.init = v.at("init").get<std::string>() == "random" ? VbemConfig::Init::random
                                                                  : VbemConfig::Init::spectral;
  }
  return cfg;
}

// Restores the full grids of the reference experiments; without this flag
// the desk-scale defaults keep runs CI-sized.
inline void apply_paper_scale(ExperimentConfig& cfg) {
  cfg.replications = 100;
  if (cfg.scenario == "fig1")
    cfg.n_grid = {50, 75, 100, 125, 150, 175, 200, 300, 500, 700};
  else if (cfg.scenario == "sparse_table1")
    cfg.rho_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45};
  else if (cfg.scenario == "rate_study")
    cfg.rate_n1_grid = {72, 144, 216, 288, 360};
}

inline ExperimentResult run_experiment_to_dir(const ExperimentConfig& cfg,
                                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  ExperimentResult result = run_experiment(cfg);
  write_file((fs::path(out_dir) / "records.csv").string(), records_to_csv(result.records));
  write_file((fs::path(out_dir) / "timings.csv").string(), timings_to_csv(result.records));
  write_file((fs::path(out_dir) / "summary.csv").string(), summary_to_csv(result.summary));
  njson manifest{{"config", experiment_config_to_json(cfg)},
                 {"schema_version", kRecordsSchemaVersion},
                 {"library_version", kLibraryVersion},
                 {"master_seed", cfg.master_seed}};
  write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2));
  return result;
}

// Convenience wrapper for the convergence-rate experiment.
inline ExperimentResult rate_study(ExperimentConfig cfg) {
  cfg.scenario = "rate_study";
  return run_experiment(cfg);
}

// ---------------------------------------------------------------------------
// Empirical check of the concentration of observed counts: for the true
// labeling, the normalized block counts o~_ab / (rho n^2) should fall within
// xi of [Q S Q^T]_ab, with Q the diagonal confusion matrix of the truth.

struct ConcentrationReport {
  std::vector<Eigen::MatrixXd> exceedance;  // per layer, k x k rates in [0,1]
  int replications = 0;
};

inline ConcentrationReport concentration_check(const Eigen::VectorXd& pi,
                                               const SparsityScaling& scaling, int n,
                                               int replications, double xi,
                                               std::uint64_t seed = 0) {
  scaling.validate();
  MlParams params;
  params.pi = pi;
  params.P = scaling.scaled();
  params.validate();
  const int k = params.k();
  const int T = params.layers();
  ConcentrationReport report;
  report.replications = replications;
  report.exceedance.assign(static_cast<std::size_t>(T), Eigen::MatrixXd::Zero(k, k));
  for (int rep = 0; rep < replications; ++rep) {
    auto [labels, graphs] =
        sample_mlsbm(n, params, derive_stream(seed, {hash_tag("concentration"), static_cast<std::uint64_t>(rep)}));
    const BlockCounts counts = block_counts(labels, graphs);
    const auto sizes = labels.class_counts();
    for (int t = 0; t < T; ++t) {
      const MatLL otilde = counts.o_tilde(t);
      const double rho = scaling.rho(t);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const double observed = static_cast<double>(otilde(a, b)) /
                                  (rho * static_cast<double>(n) * static_cast<double>(n));
          const double expected = (static_cast<double>(sizes[static_cast<std::size_t>(a)]) / n) *
                                  (static_cast<double>(sizes[static_cast<std::size_t>(b)]) / n) *
                                  scaling.S[static_cast<std::size_t>(t)](a, b);
          if (std::abs(observed - expected) > xi)
            report.exceedance[static_cast<std::size_t>(t)](a, b) += 1.0;
        }
    }
  }
  if (replications > 0)
    for (auto& m : report.exceedance) m /= static_cast<double>(replications);
  return report;
}

}  // namespace blockorder
