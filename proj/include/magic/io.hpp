#pragma once

// JSON documents for matrices and results.
//
// Matrix document:
//   {"schema_version": 1, "dim": 3, "matrix": [[[re, im], ...], ...]}
// Choi matrices carry "dims": [d_out, d_in] instead of "dim".

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bloch.hpp"
#include "channels.hpp"
#include "conversion.hpp"
#include <nlohmann/json.hpp>
#include "linalg.hpp"
#include "monotones.hpp"
#include "stabilizer.hpp"

namespace magic::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct MatrixDocument {
  int schema_version = kSchemaVersion;
  std::vector<int> dims;  // one entry for states, {d_out, d_in} for Choi matrices
  CMatrix matrix;
};

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const MatrixDocument& doc) {
  json j;
  j["schema_version"] = doc.schema_version;
  if (doc.dims.size() == 1)
    j["dim"] = doc.dims[0];
  else
    j["dims"] = doc.dims;
  j["matrix"] = matrix_to_json(doc.matrix);
  return j;
}

inline CMatrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw InputError("matrix: expected a non-empty array");
  const std::size_t n = rows.size();
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != std::size_t(m.cols()))
      throw InputError("matrix: row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      const json& e = rows[i][k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw InputError("matrix: entry (" + std::to_string(i) + "," + std::to_string(k) +
                         ") is not an [re, im] pair");
      m(Eigen::Index(i), Eigen::Index(k)) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline MatrixDocument parse_matrix_document(const json& j) {
  if (!j.is_object()) throw InputError("matrix document: expected a JSON object");
  MatrixDocument doc;
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw InputError("matrix document: missing integer schema_version");
  doc.schema_version = j["schema_version"].get<int>();
  if (doc.schema_version != kSchemaVersion)
    throw InputError("matrix document: unsupported schema_version " +
                     std::to_string(doc.schema_version));
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer()) throw InputError("matrix document: dim must be an integer");
    doc.dims = {j["dim"].get<int>()};
  } else if (j.contains("dims")) {
    if (!j["dims"].is_array()) throw InputError("matrix document: dims must be an array");
    for (const auto& d : j["dims"]) {
      if (!d.is_number_integer()) throw InputError("matrix document: dims must be integers");
      doc.dims.push_back(d.get<int>());
    }
  } else {
    throw InputError("matrix document: missing dim or dims");
  }
  if (!j.contains("matrix")) throw InputError("matrix document: missing matrix");
  doc.matrix = matrix_from_json(j["matrix"]);
  long expect = 1;
  for (int d : doc.dims) {
    if (d <= 0) throw InputError("matrix document: dimensions must be positive");
    expect *= d;
  }
  if (doc.matrix.rows() != expect || doc.matrix.cols() != expect)
    throw InputError("matrix document: matrix is " + std::to_string(doc.matrix.rows()) + "x" +
                     std::to_string(doc.matrix.cols()) + ", dims imply " + std::to_string(expect));
  return doc;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(1) << '\n';
}

inline MatrixDocument read_matrix_document(const std::string& path) {
  return parse_matrix_document(read_json_file(path));
}

inline DensityMatrix to_density(const MatrixDocument& doc, double tolerance = tol::density_trace) {
  if (doc.dims.size() != 1) throw InputError("state document: expected a single dim");
  return DensityMatrix(doc.matrix, tolerance);
}

inline ChoiMatrix to_choi(const MatrixDocument& doc, ChoiTolerance tolerance = {}) {
  if (doc.dims.size() != 2) throw InputError("Choi document: expected dims [d_out, d_in]");
  return ChoiMatrix(doc.dims[0], doc.dims[1], doc.matrix, tolerance);
}

inline MatrixDocument document(const DensityMatrix& rho) {
  return {kSchemaVersion, {rho.dim()}, rho.matrix()};
}
inline MatrixDocument document(const ChoiMatrix& j) {
  return {kSchemaVersion, {j.dim_out(), j.dim_in()}, j.matrix()};
}

/// Built-in states: T, H, mixed, mixed:d, zero, zero:d. Anything else is
/// read as a matrix document path.
inline DensityMatrix named_state(const std::string& spec) {
  auto dim_suffix = [&](const std::string& prefix) -> int {
    if (spec == prefix) return 2;
    const std::string s = spec.substr(prefix.size() + 1);
    try {
      std::size_t used = 0;
      const int d = std::stoi(s, &used);
      if (used != s.size()) throw InputError("bad dimension in state name " + spec);
      return d;
    } catch (const std::logic_error&) {
      throw InputError("bad dimension in state name " + spec);
    }
  };
  if (spec == "T") return states::t_state();
  if (spec == "H") return states::h_state();
  if (spec == "mixed" || spec.rfind("mixed:", 0) == 0) {
    const int d = dim_suffix("mixed");
    if (d <= 0) throw InputError("bad dimension in state name " + spec);
    return DensityMatrix::maximally_mixed(d);
  }
  if (spec == "zero" || spec.rfind("zero:", 0) == 0) {
    const int d = dim_suffix("zero");
    if (d <= 0) throw InputError("bad dimension in state name " + spec);
    return states::basis_state(d, 0);
  }
  const MatrixDocument doc = read_matrix_document(spec);
  // Printed documents are accepted at the precision they were written with.
  return to_density(doc, tol::printed_matrix);
}

// ---------------------------------------------------------------------------
// Result documents

inline json to_json(const SpoReport& r) {
  json v = json::array();
  for (const auto& x : r.sp_violations)
    v.push_back({{"v", x.v}, {"a", x.a}, {"u", x.u}, {"value", x.value}});
  return {{"cp_ok", r.cp_ok},
          {"tp_ok", r.tp_ok},
          {"min_eigenvalue", r.min_eigenvalue},
          {"tp_residual", r.tp_residual},
          {"worst_value", r.worst_value},
          {"exhaustive", r.exhaustive},
          {"sp_violations", v}};
}

inline json to_json(const ConversionResult& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["message"] = r.message;
  j["margins"] = {{"phase_one_slack", r.phase_one_slack},
                  {"map_error", std::isnan(r.map_error) ? json(nullptr) : json(r.map_error)},
                  {"iterations", r.iterations},
                  {"attempts", r.attempts}};
  if (r.choi) j["choi"] = to_json(document(*r.choi));
  if (r.spo) j["spo"] = to_json(*r.spo);
  if (r.witness) {
    j["witness"] = {{"sigma", to_json(document(r.witness->sigma))},
                    {"t", r.witness->t},
                    {"p", r.witness->p}};
  }
  if (r.witness_check) {
    j["witness_check"] = {{"holds", r.witness_check->holds},
                          {"lhs", r.witness_check->lhs},
                          {"rhs", r.witness_check->rhs},
                          {"margin", r.witness_check->margin}};
  }
  return j;
}

inline json to_json(const MonotoneResult& r) {
  return {{"value", r.value},
          {"q_value", r.q_value},
          {"c_constant", r.c_constant},
          {"optimal_p", r.optimal_p},
          {"optimal_S", matrix_to_json(r.optimal_s.matrix())}};
}

inline json to_json(const StabilizerReport& r) {
  return {{"stabilizer", r.stabilizer}, {"worst_v", r.worst_v}, {"worst_value", r.worst_value}};
}

inline json to_json(const WignerTable& w) {
  json rows = json::array();
  for (Eigen::Index p = 0; p < w.values.rows(); ++p) {
    json row = json::array();
    for (Eigen::Index q = 0; q < w.values.cols(); ++q) row.push_back(w.values(p, q));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace magic::io
