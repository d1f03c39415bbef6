#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dmilp/model.hpp"

namespace dmilp {

using nlohmann::json;

/// Numeric cells are JSON numbers or "p/q" fraction strings; both are
/// finite rationals, which is what the model assumes of its data.
inline double parse_rational(const json& cell, const std::string& where) {
  if (cell.is_number()) {
    double v = cell.get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(where + ": non-finite number");
    return v;
  }
  if (cell.is_string()) {
    const std::string s = cell.get<std::string>();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      double p = std::stod(s.substr(0, slash));
      double q = std::stod(s.substr(slash + 1));
      if (q == 0.0) throw std::invalid_argument("zero denominator");
      return p / q;
    } catch (const std::exception&) {
      throw std::invalid_argument(where + ": bad rational literal '" + s + "'");
    }
  }
  throw std::invalid_argument(where + ": expected number or \"p/q\" string");
}

inline Vec parse_vector(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw std::invalid_argument(where + ": expected array");
  Vec v(static_cast<Eigen::Index>(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = parse_rational(arr[i], where);
  return v;
}

inline Mat parse_matrix(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw std::invalid_argument(where + ": expected array of rows");
  int rows = static_cast<int>(arr.size());
  int cols = rows == 0 ? 0 : static_cast<int>(arr[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(arr[i].size()) != cols)
      throw std::invalid_argument(where + ": ragged matrix rows");
    for (int j = 0; j < cols; ++j)
      m(i, j) = parse_rational(arr[i][j], where);
  }
  return m;
}

inline Sense parse_sense(const std::string& s, const std::string& where) {
  if (s == "<=") return Sense::LE;
  if (s == "=" || s == "==") return Sense::EQ;
  if (s == ">=") return Sense::GE;
  throw std::invalid_argument(where + ": unknown sense '" + s + "'");
}

inline std::string sense_string(Sense s) {
  switch (s) {
    case Sense::LE: return "<=";
    case Sense::EQ: return "=";
    case Sense::GE: return ">=";
  }
  return "?";
}

inline CoupledMilp instance_from_json(const json& j) {
  CoupledMilp inst;
  inst.rhs = parse_vector(j.at("b"), "b");
  int v = 0;
  for (const auto& jb : j.at("blocks")) {
    BlockProblem b;
    b.block_id = ++v;
    std::string where = "blocks[" + std::to_string(v - 1) + "]";
    b.cost = parse_vector(jb.at("cost"), where + ".cost");
    b.E = parse_matrix(jb.at("E"), where + ".E");
    b.F = parse_matrix(jb.at("F"), where + ".F");
    b.g = parse_vector(jb.at("g"), where + ".g");
    b.A = parse_matrix(jb.at("A"), where + ".A");
    b.n_bin = static_cast<int>(b.E.cols());
    b.n_cont = static_cast<int>(b.F.cols());
    if (jb.contains("n_bin")) b.n_bin = jb.at("n_bin").get<int>();
    if (jb.contains("n_cont")) b.n_cont = jb.at("n_cont").get<int>();
    if (jb.contains("bin_constraints")) {
      for (const auto& jc : jb.at("bin_constraints")) {
        LinearConstraint c;
        c.coeffs = parse_vector(jc.at("coeffs"), where + ".bin_constraints.coeffs");
        c.sense = parse_sense(jc.at("sense").get<std::string>(), where);
        c.rhs = parse_rational(jc.at("rhs"), where + ".bin_constraints.rhs");
        b.bin_constraints.push_back(std::move(c));
      }
    }
    inst.blocks.push_back(std::move(b));
  }
  auto rep = validate_instance(inst);
  if (!rep.ok()) {
    std::string msg = "invalid instance:";
    for (const auto& is : rep.issues) msg += " [block " + std::to_string(is.block_id) + "] " + is.what + ";";
    throw std::invalid_argument(msg);
  }
  return inst;
}

inline json vector_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json matrix_to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

inline json instance_to_json(const CoupledMilp& inst, const std::string& name = "") {
  json j;
  if (!name.empty()) j["name"] = name;
  j["b"] = vector_to_json(inst.rhs);
  j["blocks"] = json::array();
  for (const auto& b : inst.blocks) {
    json jb;
    jb["n_bin"] = b.n_bin;
    jb["n_cont"] = b.n_cont;
    jb["cost"] = vector_to_json(b.cost);
    jb["bin_constraints"] = json::array();
    for (const auto& c : b.bin_constraints) {
      json jc;
      jc["coeffs"] = vector_to_json(c.coeffs);
      jc["sense"] = sense_string(c.sense);
      jc["rhs"] = c.rhs;
      jb["bin_constraints"].push_back(std::move(jc));
    }
    jb["E"] = matrix_to_json(b.E);
    jb["F"] = matrix_to_json(b.F);
    jb["g"] = vector_to_json(b.g);
    jb["A"] = matrix_to_json(b.A);
    j["blocks"].push_back(std::move(jb));
  }
  return j;
}

inline CoupledMilp load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  json j;
  in >> j;
  return instance_from_json(j);
}

inline void save_instance(const CoupledMilp& inst, const std::string& path,
                          const std::string& name = "") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(inst, name).dump(2) << "\n";
}

}  // namespace dmilp
