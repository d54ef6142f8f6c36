// blockorder command line tool: simulate collections, evaluate evidence,
// select the number of communities, run baselines and drive the Monte-Carlo
// experiment harness.

#include "blockorder/blockorder.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

using namespace blockorder;

int cmd_simulate(const std::string& model, const std::string& config_path, std::uint64_t seed,
                 const std::string& out_path) {
  const njson cfg = njson::parse(read_file(config_path));
  njson sidecar{{"model", model}, {"seed", seed}};

  if (model == "ml") {
    const int n = cfg.at("n").get<int>();
    MlParams params;
    int k_true = 0;
    if (cfg.contains("scenario")) {
      const std::string scenario = cfg.at("scenario").get<std::string>();
      if (scenario == "fig1") {
        const int T = cfg.value("T", 5);
        params = fig1_params(seed, T, cfg.value("shared_u", false));
        k_true = 6;
      } else if (scenario == "sparse_table1") {
        params = sparse_table1_params(cfg.at("rho").get<double>(), seed, cfg.value("T", 4));
        k_true = 3;
      } else if (scenario == "rate") {
        params = rate_params(seed, cfg.value("T", 4), cfg.value("k", 2));
        k_true = params.k();
      } else {
        throw std::invalid_argument("unknown scenario: " + scenario);
      }
    } else {
      params = ml_params_from_json(cfg);
      k_true = params.k();
    }
    auto [labels, graphs] = sample_mlsbm(n, params, derive_stream(seed, {hash_tag("cli-ml")}));
    save_graph(graphs, out_path);
    sidecar["k_true"] = k_true;
    sidecar["labels"] = labels_to_json(labels);
    sidecar["params"] = ml_params_to_json(params);
  } else if (model == "dyn") {
    const int n = cfg.at("n").get<int>();
    DynParams params = dyn_params_from_json(cfg);
    auto [path, graphs] = sample_dynsbm(n, params, derive_stream(seed, {hash_tag("cli-dyn")}));
    save_graph(graphs, out_path);
    sidecar["k_true"] = params.k();
    sidecar["labels"] = label_path_to_json(path);
    sidecar["z1"] = labels_to_json(path.slice(0));
    sidecar["params"] = dyn_params_to_json(params);
  } else {
    throw std::invalid_argument("--model must be ml or dyn");
  }

  write_file(out_path + ".meta.json", sidecar.dump(2));
  std::cout << njson{{"graph", out_path}, {"meta", out_path + ".meta.json"}}.dump() << "\n";
  return 0;
}

int cmd_evidence(const std::string& engine, int k, const std::string& graph_path,
                 const std::string& z1_path, double budget, const VbemConfig& vcfg,
                 std::uint64_t seed) {
  const GraphCollection g = load_graph(graph_path);
  njson out;
  if (!z1_path.empty()) {
    if (engine != "exact")
      throw std::invalid_argument("dynamic evidence has no vbem engine; use --engine exact");
    const LabelAssignment z1 = labels_from_json(njson::parse(read_file(z1_path)));
    const LogEvidence ev = log_kt_dyn_exact(g, z1, k, budget);
    out = njson{{"k", ev.k},
                {"log_evidence", ev.value},
                {"engine", engine_name(ev.engine)},
                {"configs_enumerated", ev.configs_enumerated}};
  } else if (engine == "exact") {
    const LogEvidence ev = log_kt_ml_exact(g, k, budget);
    out = njson{{"k", ev.k},
                {"log_evidence", ev.value},
                {"engine", engine_name(ev.engine)},
                {"configs_enumerated", ev.configs_enumerated}};
  } else if (engine == "vbem") {
    const LogEvidence ev = vbem_fit(g, k, vcfg, seed).second;
    out = njson{{"k", ev.k},
                {"log_evidence", ev.value},
                {"engine", engine_name(ev.engine)},
                {"iters", ev.iters},
                {"restarts_used", ev.restarts_used}};
  } else {
    throw std::invalid_argument("--engine must be exact or vbem");
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_select(const std::string& model, const std::string& graph_path, const std::string& z1_path,
               int k_max, bool full_sweep, const std::string& engine, double epsilon,
               std::uint64_t seed, const std::string& out_path, const std::string& csv_path,
               double budget, const VbemConfig& vcfg) {
  const GraphCollection g = load_graph(graph_path);
  k_max = full_sweep ? g.n() : std::min(k_max, g.n());
  SelectionConfig cfg;
  cfg.penalty.epsilon = epsilon;
  cfg.vbem = vcfg;
  cfg.exact_budget = budget;
  SelectionReport report;
  if (model == "ml") {
    report = select_k_ml(g, k_max, cfg, select_engine_from_name(engine), seed);
  } else if (model == "dyn") {
    if (z1_path.empty()) throw std::invalid_argument("--model dyn requires --z1");
    const LabelAssignment z1 = labels_from_json(njson::parse(read_file(z1_path)));
    report = select_k_dyn(g, z1, k_max, cfg, seed);
  } else {
    throw std::invalid_argument("--model must be ml or dyn");
  }
  const njson j = report_to_json(report);
  if (!out_path.empty()) write_file(out_path, j.dump(2));
  if (!csv_path.empty()) write_file(csv_path, report_to_csv(report));
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_baseline(const std::string& method, const std::string& graph_path, int k_max,
                 double epsilon, std::uint64_t seed, const std::string& engine, double budget,
                 const VbemConfig& vcfg) {
  const GraphCollection g = load_graph(graph_path);
  if (method == "bhmc") {
    njson per_layer = njson::array();
    int best = 0;
    for (int t = 0; t < g.layers(); ++t) {
      const BhmcResult b = bhmc_select(g, t, k_max);
      per_layer.push_back(njson{{"layer", t}, {"k_hat", b.k_selected}, {"empty_graph", b.empty_graph}});
      best = std::max(best, b.k_selected);
    }
    std::cout << njson{{"method", "bhmc"}, {"per_layer", per_layer}, {"k_hat_max", best}}.dump()
              << "\n";
    return 0;
  }
  if (method == "layerwise-kt") {
    SelectionConfig cfg;
    cfg.penalty.epsilon = epsilon;
    cfg.vbem = vcfg;
    cfg.exact_budget = budget;
    const int k_hat = layerwise_max_baseline(g, std::min(k_max, g.n()), cfg,
                                             select_engine_from_name(engine), seed);
    std::cout << njson{{"method", "layerwise-kt"}, {"k_hat", k_hat}}.dump() << "\n";
    return 0;
  }
  throw std::invalid_argument("--method must be bhmc or layerwise-kt");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community-count selection for collections of stochastic block models"};
  app.require_subcommand(1);

  VbemConfig vcfg;
  double budget = 1e7;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Sample a collection from a model or scenario");
  std::string sim_model = "ml", sim_config, sim_out;
  std::uint64_t sim_seed = 0;
  sim->add_option("--model", sim_model, "ml or dyn");
  sim->add_option("--config", sim_config, "JSON model/scenario description")->required();
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "output graph path (.json or binary)")->required();

  // evidence
  auto* evd = app.add_subcommand("evidence", "Evaluate log KT evidence for one k");
  std::string evd_engine = "exact", evd_graph, evd_z1;
  int evd_k = 1;
  std::uint64_t evd_seed = 0;
  evd->add_option("--engine", evd_engine, "exact or vbem");
  evd->add_option("--k", evd_k, "model order")->required();
  evd->add_option("--graph", evd_graph, "graph file")->required();
  evd->add_option("--z1", evd_z1, "initial labels (dynamic model)");
  evd->add_option("--budget", budget, "enumeration budget for the exact engine");
  evd->add_option("--restarts", vcfg.restarts, "vbem restarts");
  evd->add_option("--tol", vcfg.tol, "vbem ELBO tolerance");
  evd->add_option("--max-iters", vcfg.max_iters, "vbem sweep cap");
  evd->add_option("--seed", evd_seed, "vbem seed");

  // select
  auto* sel = app.add_subcommand("select", "Penalized KT order selection");
  std::string sel_model = "ml", sel_graph, sel_z1, sel_engine = "auto", sel_out, sel_csv;
  int sel_kmax = 15;
  bool sel_full = false;
  double sel_eps = 1e-3;
  std::uint64_t sel_seed = 0;
  sel->add_option("--model", sel_model, "ml or dyn");
  sel->add_option("--graph", sel_graph, "graph file")->required();
  sel->add_option("--z1", sel_z1, "initial labels (dynamic model)");
  sel->add_option("--kmax", sel_kmax, "largest candidate order (clamped to n)");
  sel->add_flag("--full-sweep", sel_full, "sweep every candidate 1..n");
  sel->add_option("--engine", sel_engine, "exact, vbem or auto");
  sel->add_option("--epsilon", sel_eps, "penalty epsilon");
  sel->add_option("--seed", sel_seed, "selection seed");
  sel->add_option("--out", sel_out, "report JSON path");
  sel->add_option("--csv", sel_csv, "report CSV path");
  sel->add_option("--budget", budget, "enumeration budget for the exact engine");
  sel->add_option("--restarts", vcfg.restarts, "vbem restarts");
  sel->add_option("--tol", vcfg.tol, "vbem ELBO tolerance");

  // baseline
  auto* bas = app.add_subcommand("baseline", "Bethe-Hessian or layer-wise KT baseline");
  std::string bas_method = "bhmc", bas_graph, bas_engine = "auto";
  int bas_kmax = 15;
  double bas_eps = 1e-3;
  std::uint64_t bas_seed = 0;
  bas->add_option("--method", bas_method, "bhmc or layerwise-kt");
  bas->add_option("--graph", bas_graph, "graph file")->required();
  bas->add_option("--kmax", bas_kmax, "largest candidate order");
  bas->add_option("--epsilon", bas_eps, "penalty epsilon (layerwise-kt)");
  bas->add_option("--engine", bas_engine, "engine for layerwise-kt");
  bas->add_option("--seed", bas_seed, "seed for layerwise-kt");
  bas->add_option("--budget", budget, "enumeration budget");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte-Carlo accuracy experiments");
  std::string exp_config, exp_outdir = "results";
  bool paper_scale = false;
  exp->add_option("--config", exp_config, "experiment config JSON")->required();
  exp->add_option("--out-dir", exp_outdir, "output directory");
  exp->add_flag("--paper-scale", paper_scale, "restore the full reference grids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_model, sim_config, sim_seed, sim_out);
    if (evd->parsed())
      return cmd_evidence(evd_engine, evd_k, evd_graph, evd_z1, budget, vcfg, evd_seed);
    if (sel->parsed())
      return cmd_select(sel_model, sel_graph, sel_z1, sel_kmax, sel_full, sel_engine, sel_eps,
                        sel_seed, sel_out, sel_csv, budget, vcfg);
    if (bas->parsed())
      return cmd_baseline(bas_method, bas_graph, bas_kmax, bas_eps, bas_seed, bas_engine, budget,
                          vcfg);
    if (exp->parsed()) {
      blockorder::ExperimentConfig cfg =
          blockorder::experiment_config_from_json(blockorder::njson::parse(blockorder::read_file(exp_config)));
      if (paper_scale) blockorder::apply_paper_scale(cfg);
      const auto result = blockorder::run_experiment_to_dir(cfg, exp_outdir);
      std::cout << blockorder::njson{{"records", result.records.size()},
                                     {"out_dir", exp_outdir}}.dump()
                << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
