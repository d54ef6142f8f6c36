// Penalized order selection: sweep k, score each candidate as
// log-evidence minus penalty, return the smallest argmax.

#pragma once

#include "blockorder/exact.hpp"
#include "blockorder/io.hpp"
#include "blockorder/penalty.hpp"
#include "blockorder/vbem.hpp"

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockorder {

enum class SelectEngine { exact, vbem, automatic };

inline const char* select_engine_name(SelectEngine e) {
  switch (e) {
    case SelectEngine::exact: return "exact";
    case SelectEngine::vbem: return "vbem";
    default: return "auto";
  }
}

inline SelectEngine select_engine_from_name(const std::string& s) {
  if (s == "exact") return SelectEngine::exact;
  if (s == "vbem") return SelectEngine::vbem;
  if (s == "auto") return SelectEngine::automatic;
  throw std::invalid_argument("unknown engine: " + s);
}

struct SelectionConfig {
  PenaltyConfig penalty;
  VbemConfig vbem;
  double exact_budget = 1e7;
};

struct SelectionReport {
  struct Row {
    int k;
    double log_evidence;
    double penalty;
    double score;  // log_evidence - penalty
    Engine engine;
  };
  std::vector<Row> per_k;
  int k_hat = 1;
  int k_max = 1;
  std::string model;  // "ml" or "dyn"
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline bool exact_feasible_ml(const GraphCollection& g, int k, double budget) {
  return pow_ll(k, g.n()) <= budget;
}

}  // namespace detail

inline SelectionReport select_k_ml(const GraphCollection& g, int k_max,
                                   const SelectionConfig& cfg = {},
                                   SelectEngine engine = SelectEngine::automatic,
                                   std::uint64_t seed = 0) {
  if (k_max < 1 || k_max > g.n())
    throw std::invalid_argument("select_k_ml: need 1 <= k_max <= n");
  SelectionReport report;
  report.k_max = k_max;
  report.model = "ml";
  report.epsilon = cfg.penalty.epsilon;
  report.seed = seed;
  double best = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const bool use_exact =
        engine == SelectEngine::exact ||
        (engine == SelectEngine::automatic && detail::exact_feasible_ml(g, k, cfg.exact_budget));
    LogEvidence ev;
    if (use_exact) {
      ev = log_kt_ml_exact(g, k, cfg.exact_budget);
    } else {
      ev = vbem_fit(g, k, cfg.vbem, derive_stream(seed, {hash_tag("select-ml"), static_cast<std::uint64_t>(k)})).second;
    }
    const double pen = pen_ml(k, g.n(), g.layers(), cfg.penalty);
    const double score = ev.value - pen;
    report.per_k.push_back({k, ev.value, pen, score, ev.engine});
    if (k == 1 || score > best) {
      best = score;
      report.k_hat = k;
    }
  }
  return report;
}

inline SelectionReport select_k_dyn(const GraphCollection& g, const LabelAssignment& z1,
                                    int k_max, const SelectionConfig& cfg = {},
                                    std::uint64_t seed = 0) {
  if (k_max < 1 || k_max > g.n())
    throw std::invalid_argument("select_k_dyn: need 1 <= k_max <= n");
  int max_label = 0;
  for (int v : z1.labels) max_label = std::max(max_label, v);
  if (k_max < max_label + 1)
    throw std::invalid_argument("select_k_dyn: k_max is below the number of labels used by z1");
  SelectionReport report;
  report.k_max = k_max;
  report.model = "dyn";
  report.epsilon = cfg.penalty.epsilon;
  report.seed = seed;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    const double pen = pen_dyn(k, g.n(), g.layers(), cfg.penalty);
    if (k < max_label + 1) {
      // a k-community model cannot condition on a configuration using more
      // than k labels; such candidates never win
      const double ninf = -std::numeric_limits<double>::infinity();
      report.per_k.push_back({k, ninf, pen, ninf, Engine::exact});
      continue;
    }
    LogEvidence ev = log_kt_dyn_exact(g, z1, k, cfg.exact_budget);
    const double score = ev.value - pen;
    report.per_k.push_back({k, ev.value, pen, score, ev.engine});
    if (score > best) {
      best = score;
      report.k_hat = k;
    }
  }
  return report;
}

// Runs the single-layer selector on every layer separately and keeps the
// largest estimate.
inline int layerwise_max_baseline(const GraphCollection& g, int k_max,
                                  const SelectionConfig& cfg = {},
                                  SelectEngine engine = SelectEngine::automatic,
                                  std::uint64_t seed = 0) {
  int best = 1;
  for (int t = 0; t < g.layers(); ++t) {
    const GraphCollection layer = g.layer_copy(t);
    const SelectionReport rep = select_k_ml(
        layer, k_max, cfg, engine,
        derive_stream(seed, {hash_tag("layerwise"), static_cast<std::uint64_t>(t)}));
    best = std::max(best, rep.k_hat);
  }
  return best;
}

inline njson report_to_json(const SelectionReport& r) {
  njson per_k = njson::array();
  for (const auto& row : r.per_k)
    per_k.push_back(njson{{"k", row.k},
                          {"log_evidence", row.log_evidence},
                          {"penalty", row.penalty},
                          {"score", row.score},
                          {"engine", engine_name(row.engine)}});
  return njson{{"model", r.model},  {"k_max", r.k_max}, {"epsilon", r.epsilon},
               {"seed", r.seed},    {"k_hat", r.k_hat}, {"per_k", std::move(per_k)}};
}

inline std::string report_to_csv(const SelectionReport& r) {
  std::ostringstream out;
  out << "k,log_evidence,penalty,score,engine\n";
  out.precision(17);
  for (const auto& row : r.per_k)
    out << row.k << ',' << row.log_evidence << ',' << row.penalty << ',' << row.score << ','
        << engine_name(row.engine) << '\n';
  return out.str();
}

}  // namespace blockorder
