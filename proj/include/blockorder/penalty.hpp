// Model-order penalties for the two models.  Each term of the sum over
// i < k charges half a log-sample-size per free parameter added when going
// from i to i+1 groups, plus the (1 + epsilon) log n overestimation guard.

#pragma once

#include <cmath>
#include <stdexcept>

namespace blockorder {

struct PenaltyConfig {
  // Reported results are insensitive over [1e-8, 0.1]; any positive value
  // is accepted.
  double epsilon = 1e-3;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("PenaltyConfig: epsilon must be positive");
  }
};

inline double pen_ml(int k, long long n, int T, const PenaltyConfig& cfg = {}) {
  if (k < 1 || n < 1 || T < 1) throw std::invalid_argument("pen_ml: arguments must be positive");
  cfg.validate();
  const double log_n = std::log(static_cast<double>(n));
  double pen = 0.0;
  for (int i = 1; i < k; ++i) {
    const double di = static_cast<double>(i);
    pen += ((static_cast<double>(T) * di * (di + 1.0) + di - 1.0) / 2.0 + 1.0 + cfg.epsilon) * log_n;
  }
  return pen;
}

inline double pen_dyn(int k, long long n, int T, const PenaltyConfig& cfg = {}) {
  if (k < 1 || n < 1 || T < 1) throw std::invalid_argument("pen_dyn: arguments must be positive");
  cfg.validate();
  const double dn = static_cast<double>(n);
  const double dT = static_cast<double>(T);
  const double log_n = std::log(dn);
  const double log_n2T = std::log(dn * dn * dT);
  const double log_nT = std::log(dn * dT);
  double pen = 0.0;
  for (int i = 1; i < k; ++i) {
    const double di = static_cast<double>(i);
    pen += di / 2.0 * log_n2T + di * (di - 1.0) / 2.0 * log_nT +
           (dT * di * (di - 1.0) / 2.0 + 1.0 + cfg.epsilon) * log_n;
  }
  return pen;
}

}  // namespace blockorder
