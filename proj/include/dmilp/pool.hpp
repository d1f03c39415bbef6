#pragma once

#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "dmilp/model.hpp"

namespace dmilp {

/// The inequality that excludes exactly `uhat` from the 0/1 cube:
///   sum_{k: uhat_k=0} u_k + sum_{k: uhat_k=1} (1 - u_k) >= 1
/// returned in coefficient form  c.u >= 1 - |ones(uhat)|.
inline LinearConstraint sbc_cut(const BinaryVec& uhat) {
  LinearConstraint c;
  c.coeffs = Vec(static_cast<Eigen::Index>(uhat.size()));
  int ones = 0;
  for (size_t k = 0; k < uhat.size(); ++k) {
    if (uhat[k]) {
      c.coeffs[static_cast<Eigen::Index>(k)] = -1.0;
      ++ones;
    } else {
      c.coeffs[static_cast<Eigen::Index>(k)] = 1.0;
    }
  }
  c.sense = Sense::GE;
  c.rhs = 1.0 - ones;
  return c;
}

/// Minimal per-block projections of a set of global binary vectors,
/// insertion-ordered: S_v collects the distinct v-subvectors of members
/// of S, so S is contained in S_1 x ... x S_N and nothing smaller works.
inline std::vector<std::vector<BinaryVec>> project_pool(const std::vector<int>& bin_sizes,
                                                        const std::vector<BinaryVec>& S) {
  std::vector<std::vector<BinaryVec>> proj(bin_sizes.size());
  std::vector<std::unordered_set<std::string>> seen(bin_sizes.size());
  for (const auto& u : S) {
    size_t off = 0;
    for (size_t v = 0; v < bin_sizes.size(); ++v) {
      BinaryVec part(u.begin() + off, u.begin() + off + bin_sizes[v]);
      off += static_cast<size_t>(bin_sizes[v]);
      std::string key = binary_to_string(part);
      if (seen[v].insert(key).second) proj[v].push_back(std::move(part));
    }
  }
  return proj;
}

/// Explored-solution set with per-block projections, match tuples, and
/// generation metadata for the dump format.
struct BinaryPool {
  struct Meta {
    long iteration_found = 0;
    bool feasible = false;
    double z = kInf;  // z(u) when evaluated and feasible
  };

  std::vector<int> bin_sizes;
  std::vector<BinaryVec> members;                             // S, insertion order
  std::vector<Meta> meta;
  std::vector<std::vector<BinaryVec>> proj;                   // S_v values, insertion order
  std::vector<std::vector<int>> tuples;                       // per member: 1-based index into each S_v

  explicit BinaryPool(std::vector<int> sizes = {}) : bin_sizes(std::move(sizes)) {
    proj.resize(bin_sizes.size());
    proj_index_.resize(bin_sizes.size());
  }

  int size() const { return static_cast<int>(members.size()); }
  bool contains(const BinaryVec& u) const { return index_.count(binary_to_string(u)) > 0; }

  /// Returns the 1-based index of u_v in S_v, or 0 when absent.
  int project_index(int v, const BinaryVec& part) const {
    auto it = proj_index_[static_cast<size_t>(v)].find(binary_to_string(part));
    return it == proj_index_[static_cast<size_t>(v)].end() ? 0 : it->second;
  }

  /// Insert the v-subvector into S_v (pool growth without a full member).
  /// Returns its 1-based index.
  int add_projection(int v, const BinaryVec& part) {
    int idx = project_index(v, part);
    if (idx) return idx;
    proj[static_cast<size_t>(v)].push_back(part);
    idx = static_cast<int>(proj[static_cast<size_t>(v)].size());
    proj_index_[static_cast<size_t>(v)][binary_to_string(part)] = idx;
    return idx;
  }

  /// Insert a full global vector; returns true when new. Projections and
  /// the member's match tuple are kept consistent.
  bool add(const BinaryVec& u, long iteration = 0) {
    std::string key = binary_to_string(u);
    if (!index_.insert(key).second) return false;
    members.push_back(u);
    meta.push_back(Meta{iteration, false, kInf});
    std::vector<int> tuple;
    size_t off = 0;
    for (size_t v = 0; v < bin_sizes.size(); ++v) {
      BinaryVec part(u.begin() + off, u.begin() + off + bin_sizes[v]);
      off += static_cast<size_t>(bin_sizes[v]);
      tuple.push_back(add_projection(static_cast<int>(v), part));
    }
    tuples.push_back(std::move(tuple));
    return true;
  }

  void record_evaluation(const BinaryVec& u, bool feasible, double z) {
    std::string key = binary_to_string(u);
    for (size_t i = 0; i < members.size(); ++i)
      if (binary_to_string(members[i]) == key) {
        meta[i].feasible = feasible;
        meta[i].z = z;
        return;
      }
  }

  nlohmann::json to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (size_t i = 0; i < members.size(); ++i) {
      nlohmann::json j;
      j["u"] = binary_to_string(members[i]);
      j["iteration_found"] = meta[i].iteration_found;
      j["feasible"] = meta[i].feasible;
      if (meta[i].feasible) j["z"] = meta[i].z;
      out.push_back(std::move(j));
    }
    return out;
  }

  void dump(const std::string& path) const {
    std::ofstream out(path);
    out << to_json().dump(2) << "\n";
  }

 private:
  std::unordered_set<std::string> index_;
  std::vector<std::unordered_map<std::string, int>> proj_index_;
};

}  // namespace dmilp
