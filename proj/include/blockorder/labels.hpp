// Label containers for the two latent structures: one assignment shared by
// all layers (multi-layer model) and a per-time path (dynamic model).
// Labels are 0-based in memory; file formats and reports use 1-based labels
// with conversion at the I/O boundary only.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace blockorder {

struct LabelAssignment {
  int k = 1;
  std::vector<int> labels;  // values in [0, k)

  LabelAssignment() = default;
  LabelAssignment(int k_, std::vector<int> labels_) : k(k_), labels(std::move(labels_)) {
    validate();
  }

  int n() const { return static_cast<int>(labels.size()); }

  void validate() const {
    if (k < 1) throw std::invalid_argument("LabelAssignment: k must be >= 1");
    for (int z : labels)
      if (z < 0 || z >= k)
        throw std::invalid_argument("LabelAssignment: label out of range [0," + std::to_string(k) + ")");
  }

  std::vector<long long> class_counts() const {
    std::vector<long long> counts(static_cast<std::size_t>(k), 0);
    for (int z : labels) ++counts[static_cast<std::size_t>(z)];
    return counts;
  }

  bool operator==(const LabelAssignment& o) const = default;
};

struct LabelPath {
  int k = 1;
  std::vector<std::vector<int>> labels;  // labels[t][i] in [0, k)

  LabelPath() = default;
  LabelPath(int k_, std::vector<std::vector<int>> labels_) : k(k_), labels(std::move(labels_)) {
    validate();
  }

  int layers() const { return static_cast<int>(labels.size()); }
  int n() const { return labels.empty() ? 0 : static_cast<int>(labels[0].size()); }

  void validate() const {
    if (k < 1) throw std::invalid_argument("LabelPath: k must be >= 1");
    if (labels.empty()) throw std::invalid_argument("LabelPath: needs at least one time slice");
    const std::size_t n0 = labels[0].size();
    for (const auto& slice : labels) {
      if (slice.size() != n0) throw std::invalid_argument("LabelPath: ragged time slices");
      for (int z : slice)
        if (z < 0 || z >= k) throw std::invalid_argument("LabelPath: label out of range");
    }
  }

  LabelAssignment slice(int t) const { return LabelAssignment(k, labels.at(static_cast<std::size_t>(t))); }

  bool operator==(const LabelPath& o) const = default;
};

// Joint frequency matrix between a candidate labeling (rows) and a reference
// labeling (columns); total mass 1, and n * (Q^T 1) recovers the reference
// class counts.
struct ConfusionMatrix {
  Eigen::MatrixXd q;
};

inline ConfusionMatrix confusion_matrix(const LabelAssignment& zbar, const LabelAssignment& z) {
  if (zbar.n() != z.n())
    throw std::invalid_argument("confusion_matrix: labelings have different lengths");
  const int n = z.n();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(zbar.k, z.k);
  for (int i = 0; i < n; ++i)
    q(zbar.labels[static_cast<std::size_t>(i)], z.labels[static_cast<std::size_t>(i)]) += 1.0;
  q /= static_cast<double>(n);
  return ConfusionMatrix{std::move(q)};
}

}  // namespace blockorder
