// File formats.
//
// Graph collections travel in two equivalent forms:
//   * JSON: {"n": n, "T": T, "layers": [ [[0,1,...],...], ... ]} with full
//     dense 0/1 matrices, validated on load;
//   * binary: magic "BOGC", little-endian u32 n, u32 T, then one bitmap per
//     layer holding the strict upper triangle in row-major pair order
//     (0,1),(0,2),...,(1,2),..., packed 8 edges per byte, least significant
//     bit first, each layer padded to a whole byte.
// Labels and parameters use small JSON documents; labels are 1-based on
// disk and 0-based in memory.

#pragma once

#include "blockorder/graph.hpp"
#include "blockorder/labels.hpp"
#include "blockorder/params.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockorder {

using njson = nlohmann::json;

// ---------------------------------------------------------------------------
// GraphCollection <-> JSON

inline njson graph_to_json(const GraphCollection& g) {
  njson layers = njson::array();
  for (int t = 0; t < g.layers(); ++t) {
    njson rows = njson::array();
    for (int i = 0; i < g.n(); ++i) {
      njson row = njson::array();
      for (int j = 0; j < g.n(); ++j) row.push_back(g.edge(t, i, j) ? 1 : 0);
      rows.push_back(std::move(row));
    }
    layers.push_back(std::move(rows));
  }
  return njson{{"n", g.n()}, {"T", g.layers()}, {"layers", std::move(layers)}};
}

inline GraphCollection graph_from_json(const njson& j) {
  if (!j.contains("n") || !j.contains("T") || !j.contains("layers"))
    throw std::invalid_argument("graph_from_json: missing n, T or layers");
  const int n = j.at("n").get<int>();
  const int T = j.at("T").get<int>();
  auto layers = j.at("layers").get<std::vector<std::vector<std::vector<int>>>>();
  if (static_cast<int>(layers.size()) != T)
    throw std::invalid_argument("graph_from_json: layer count does not match T");
  GraphCollection g = GraphCollection::from_dense(layers);
  if (g.n() != n) throw std::invalid_argument("graph_from_json: node count does not match n");
  return g;
}

// ---------------------------------------------------------------------------
// GraphCollection <-> binary

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline std::uint32_t get_u32_le(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in.at(pos + b))) << (8 * b);
  return v;
}

}  // namespace detail

inline std::string graph_to_binary(const GraphCollection& g) {
  std::string out = "BOGC";
  detail::put_u32_le(out, static_cast<std::uint32_t>(g.n()));
  detail::put_u32_le(out, static_cast<std::uint32_t>(g.layers()));
  const long long pairs = static_cast<long long>(g.n()) * (g.n() - 1) / 2;
  for (int t = 0; t < g.layers(); ++t) {
    std::string bitmap(static_cast<std::size_t>((pairs + 7) / 8), '\0');
    long long e = 0;
    for (int i = 0; i < g.n(); ++i)
      for (int j = i + 1; j < g.n(); ++j, ++e)
        if (g.edge(t, i, j))
          bitmap[static_cast<std::size_t>(e / 8)] |= static_cast<char>(1u << (e % 8));
    out += bitmap;
  }
  return out;
}

inline GraphCollection graph_from_binary(const std::string& in) {
  if (in.size() < 12 || in.compare(0, 4, "BOGC") != 0)
    throw std::invalid_argument("graph_from_binary: bad magic bytes");
  const int n = static_cast<int>(detail::get_u32_le(in, 4));
  const int T = static_cast<int>(detail::get_u32_le(in, 8));
  if (n <= 0 || T <= 0) throw std::invalid_argument("graph_from_binary: bad dimensions");
  const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
  const std::size_t layer_bytes = static_cast<std::size_t>((pairs + 7) / 8);
  if (in.size() != 12 + layer_bytes * static_cast<std::size_t>(T))
    throw std::invalid_argument("graph_from_binary: truncated payload");
  GraphCollection g(n, T);
  for (int t = 0; t < T; ++t) {
    const std::size_t base = 12 + layer_bytes * static_cast<std::size_t>(t);
    long long e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++e) {
        const unsigned char byte = static_cast<unsigned char>(in[base + static_cast<std::size_t>(e / 8)]);
        if ((byte >> (e % 8)) & 1u) g.set_edge(t, i, j, true);
      }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Labels and parameters

inline njson labels_to_json(const LabelAssignment& z) {
  njson arr = njson::array();
  for (int v : z.labels) arr.push_back(v + 1);
  return njson{{"k", z.k}, {"labels", std::move(arr)}};
}

inline LabelAssignment labels_from_json(const njson& j) {
  const njson& arr = j.is_array() ? j : j.at("labels");
  std::vector<int> labels;
  labels.reserve(arr.size());
  int max_label = 1;
  for (const auto& v : arr) {
    const int one_based = v.get<int>();
    if (one_based < 1) throw std::invalid_argument("labels_from_json: labels are 1-based");
    labels.push_back(one_based - 1);
    max_label = std::max(max_label, one_based);
  }
  const int k = j.is_object() && j.contains("k") ? j.at("k").get<int>() : max_label;
  return LabelAssignment(k, std::move(labels));
}

inline njson label_path_to_json(const LabelPath& z) {
  njson slices = njson::array();
  for (const auto& slice : z.labels) {
    njson arr = njson::array();
    for (int v : slice) arr.push_back(v + 1);
    slices.push_back(std::move(arr));
  }
  return njson{{"k", z.k}, {"labels", std::move(slices)}};
}

inline LabelPath label_path_from_json(const njson& j) {
  const njson& outer = j.is_array() ? j : j.at("labels");
  std::vector<std::vector<int>> labels;
  int max_label = 1;
  for (const auto& slice : outer) {
    std::vector<int> s;
    s.reserve(slice.size());
    for (const auto& v : slice) {
      const int one_based = v.get<int>();
      if (one_based < 1) throw std::invalid_argument("label_path_from_json: labels are 1-based");
      s.push_back(one_based - 1);
      max_label = std::max(max_label, one_based);
    }
    labels.push_back(std::move(s));
  }
  const int k = j.is_object() && j.contains("k") ? j.at("k").get<int>() : max_label;
  return LabelPath(k, std::move(labels));
}

namespace detail {

inline njson matrix_to_json(const Eigen::MatrixXd& m) {
  njson rows = njson::array();
  for (int a = 0; a < m.rows(); ++a) {
    njson row = njson::array();
    for (int b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const njson& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw std::invalid_argument("matrix_from_json: empty matrix");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a].size() != rows[0].size())
      throw std::invalid_argument("matrix_from_json: ragged matrix");
    for (std::size_t b = 0; b < rows[a].size(); ++b)
      m(static_cast<int>(a), static_cast<int>(b)) = rows[a][b];
  }
  return m;
}

}  // namespace detail

inline njson ml_params_to_json(const MlParams& p) {
  njson pi = njson::array();
  for (int a = 0; a < p.pi.size(); ++a) pi.push_back(p.pi(a));
  njson P = njson::array();
  for (const auto& m : p.P) P.push_back(detail::matrix_to_json(m));
  return njson{{"pi", std::move(pi)}, {"P", std::move(P)}};
}

inline MlParams ml_params_from_json(const njson& j) {
  MlParams p;
  const auto pi = j.at("pi").get<std::vector<double>>();
  p.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), static_cast<int>(pi.size()));
  for (const auto& m : j.at("P")) p.P.push_back(detail::matrix_from_json(m));
  p.validate();
  return p;
}

inline njson dyn_params_to_json(const DynParams& p) {
  njson P = njson::array();
  for (const auto& m : p.P) P.push_back(detail::matrix_to_json(m));
  njson alpha = njson::array();
  for (int a = 0; a < p.alpha.size(); ++a) alpha.push_back(p.alpha(a));
  return njson{{"trans", detail::matrix_to_json(p.trans)},
               {"P", std::move(P)},
               {"alpha", std::move(alpha)}};
}

inline DynParams dyn_params_from_json(const njson& j) {
  std::vector<Eigen::MatrixXd> P;
  for (const auto& m : j.at("P")) P.push_back(detail::matrix_from_json(m));
  return DynParams(detail::matrix_from_json(j.at("trans")), std::move(P));
}

// ---------------------------------------------------------------------------
// Path helpers; ".json" selects the JSON form, everything else the binary.

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline void save_graph(const GraphCollection& g, const std::string& path) {
  if (has_suffix(path, ".json"))
    write_file(path, graph_to_json(g).dump());
  else
    write_file(path, graph_to_binary(g));
}

inline GraphCollection load_graph(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.compare(0, 4, "BOGC") == 0) return graph_from_binary(bytes);
  return graph_from_json(njson::parse(bytes));
}

}  // namespace blockorder
