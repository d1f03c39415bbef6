#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmilp/lp.hpp"
#include "dmilp/types.hpp"

namespace dmilp {

/// One agent's private data: objective slice, binary feasible set U,
/// conditional polyhedron Y(u) = { y : E u + F y <= g } and its coupling
/// columns. Immutable after construction; safe to share across threads.
struct BlockProblem {
  int block_id = 0;  // 1-based
  int n_bin = 0;
  int n_cont = 0;
  Vec cost;                                       // length n_bin + n_cont, (u, y) order
  std::vector<LinearConstraint> bin_constraints;  // over u only
  Mat E;                                          // rows x n_bin
  Mat F;                                          // rows x n_cont
  Vec g;
  Mat A;  // m x (n_bin + n_cont)

  int dim() const { return n_bin + n_cont; }
  int cond_rows() const { return static_cast<int>(g.size()); }

  Vec stack(const BinaryVec& u, const Vec& y) const {
    Vec x(dim());
    for (int i = 0; i < n_bin; ++i) x[i] = u[static_cast<size_t>(i)];
    x.tail(n_cont) = y;
    return x;
  }

  /// Membership test for U: evaluate the binary constraints on a 0/1 vector.
  bool binaries_feasible(const BinaryVec& u) const {
    if (static_cast<int>(u.size()) != n_bin) return false;
    Vec uv = binary_to_vec(u);
    for (const auto& c : bin_constraints)
      if (!c.satisfied(uv)) return false;
    return true;
  }
};

/// The global problem: N blocks plus coupling rows sum_v A_v x_v = b.
struct CoupledMilp {
  std::vector<BlockProblem> blocks;
  Vec rhs;  // b

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int num_coupling() const { return static_cast<int>(rhs.size()); }
  int total_bin() const {
    int s = 0;
    for (const auto& b : blocks) s += b.n_bin;
    return s;
  }
  int total_cont() const {
    int s = 0;
    for (const auto& b : blocks) s += b.n_cont;
    return s;
  }
  int total_vars() const { return total_bin() + total_cont(); }

  /// Offset of block v's variables in the stacked (u_v, y_v)-per-block layout.
  int block_offset(int v) const {
    int off = 0;
    for (int i = 0; i < v; ++i) off += blocks[i].dim();
    return off;
  }
  /// Offset of block v's binaries in the stacked global binary vector.
  int bin_offset(int v) const {
    int off = 0;
    for (int i = 0; i < v; ++i) off += blocks[i].n_bin;
    return off;
  }
};

/// Per-block binaries and continuous values with the instance's shapes.
struct MixedSolution {
  std::vector<BinaryVec> u;
  std::vector<Vec> y;
  double objective = 0.0;
};

struct ValidationIssue {
  int block_id = 0;  // 0 = instance-level
  std::string what;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::string note =
      "structure only: feasibility and boundedness are checked by the "
      "solver oracles, not here";
  bool ok() const { return issues.empty(); }
};

inline ValidationReport validate_instance(const CoupledMilp& inst) {
  ValidationReport rep;
  auto flag = [&rep](int id, const std::string& w) { rep.issues.push_back({id, w}); };
  int m = inst.num_coupling();
  if (!all_finite(inst.rhs)) flag(0, "non-finite entry in coupling rhs b");
  for (int v = 0; v < inst.num_blocks(); ++v) {
    const BlockProblem& b = inst.blocks[v];
    int id = b.block_id;
    if (id != v + 1) flag(id, "block ids must be 1..N in order without gaps");
    if (b.cost.size() != b.dim()) flag(id, "cost length != n_bin + n_cont");
    if (b.E.rows() != b.F.rows() || b.E.rows() != b.g.size())
      flag(id, "E, F, g row counts disagree");
    if (b.E.cols() != b.n_bin) flag(id, "E column count != n_bin");
    if (b.F.cols() != b.n_cont) flag(id, "F column count != n_cont");
    if (b.A.rows() != m) flag(id, "coupling matrix row count differs from b");
    if (b.A.cols() != b.dim()) flag(id, "coupling matrix column count != block dimension");
    if (!all_finite(b.cost)) flag(id, "non-finite cost coefficient");
    if (!all_finite(b.E) || !all_finite(b.F) || !all_finite(b.g))
      flag(id, "non-finite conditional-constraint coefficient");
    if (!all_finite(b.A)) flag(id, "non-finite coupling coefficient");
    for (const auto& c : b.bin_constraints) {
      if (c.coeffs.size() != b.n_bin) flag(id, "binary constraint length != n_bin");
      if (!all_finite(c.coeffs) || !std::isfinite(c.rhs))
        flag(id, "non-finite binary-constraint coefficient");
    }
  }
  return rep;
}

inline void check_solution_shape(const CoupledMilp& inst, const MixedSolution& sol) {
  if (static_cast<int>(sol.u.size()) != inst.num_blocks() ||
      static_cast<int>(sol.y.size()) != inst.num_blocks())
    throw std::invalid_argument("solution block count mismatch");
  for (int v = 0; v < inst.num_blocks(); ++v) {
    if (static_cast<int>(sol.u[v].size()) != inst.blocks[v].n_bin ||
        sol.y[v].size() != inst.blocks[v].n_cont)
      throw std::invalid_argument("solution dimension mismatch in block " +
                                  std::to_string(v + 1));
  }
}

/// sum_v c_v . (u_v, y_v)
inline double evaluate_objective(const CoupledMilp& inst, const MixedSolution& sol) {
  check_solution_shape(inst, sol);
  double z = 0.0;
  for (int v = 0; v < inst.num_blocks(); ++v)
    z += inst.blocks[v].cost.dot(inst.blocks[v].stack(sol.u[v], sol.y[v]));
  return z;
}

/// b - sum_v A_v x_v
inline Vec coupling_residual(const CoupledMilp& inst, const MixedSolution& sol) {
  check_solution_shape(inst, sol);
  Vec r = inst.rhs;
  for (int v = 0; v < inst.num_blocks(); ++v)
    r -= inst.blocks[v].A * inst.blocks[v].stack(sol.u[v], sol.y[v]);
  return r;
}

/// Adds block v's local rows (U_v and Y_v) to `lp`, with the block's
/// variables at column offset `off`. u-columns are bounded [0,1] and
/// reported in `binaries` unless `relax_binaries`.
inline void append_block_rows(LpProblem& lp, std::vector<int>* binaries, const BlockProblem& b,
                              int off, bool relax_binaries = false) {
  for (int j = 0; j < b.n_bin; ++j) {
    lp.lower[off + j] = 0.0;
    lp.upper[off + j] = 1.0;
    if (!relax_binaries && binaries) binaries->push_back(off + j);
  }
  for (const auto& c : b.bin_constraints) {
    LpProblem::Row row;
    row.sense = c.sense;
    row.rhs = c.rhs;
    for (int j = 0; j < b.n_bin; ++j)
      if (c.coeffs[j] != 0.0) {
        row.idx.push_back(off + j);
        row.val.push_back(c.coeffs[j]);
      }
    lp.rows.push_back(std::move(row));
  }
  for (int r = 0; r < b.cond_rows(); ++r) {
    LpProblem::Row row;
    row.sense = Sense::LE;
    row.rhs = b.g[r];
    for (int j = 0; j < b.n_bin; ++j)
      if (b.E(r, j) != 0.0) {
        row.idx.push_back(off + j);
        row.val.push_back(b.E(r, j));
      }
    for (int j = 0; j < b.n_cont; ++j)
      if (b.F(r, j) != 0.0) {
        row.idx.push_back(off + b.n_bin + j);
        row.val.push_back(b.F(r, j));
      }
    lp.rows.push_back(std::move(row));
  }
}

/// Monolithic recast: stacked variables, all local rows, then the m
/// coupling equalities (appended last, in order).
inline MilpProblem assemble_central(const CoupledMilp& inst) {
  MilpProblem p;
  int n = inst.total_vars();
  p.lp.objective = Vec::Zero(n);
  p.lp.lower.assign(n, -kInf);
  p.lp.upper.assign(n, kInf);
  for (int v = 0; v < inst.num_blocks(); ++v) {
    int off = inst.block_offset(v);
    const BlockProblem& b = inst.blocks[v];
    p.lp.objective.segment(off, b.dim()) = b.cost;
    append_block_rows(p.lp, &p.binaries, b, off);
  }
  for (int i = 0; i < inst.num_coupling(); ++i) {
    LpProblem::Row row;
    row.sense = Sense::EQ;
    row.rhs = inst.rhs[i];
    for (int v = 0; v < inst.num_blocks(); ++v) {
      int off = inst.block_offset(v);
      const BlockProblem& b = inst.blocks[v];
      for (int j = 0; j < b.dim(); ++j)
        if (b.A(i, j) != 0.0) {
          row.idx.push_back(off + j);
          row.val.push_back(b.A(i, j));
        }
    }
    p.lp.rows.push_back(std::move(row));
  }
  return p;
}

/// Index of the first coupling row in assemble_central's row order.
inline int central_coupling_row_offset(const CoupledMilp& inst) {
  int rows = 0;
  for (const auto& b : inst.blocks)
    rows += static_cast<int>(b.bin_constraints.size()) + b.cond_rows();
  return rows;
}

/// The best-completion LP for a fixed global binary vector: variables are
/// the stacked y, the objective constant carries the binary cost share.
/// The m coupling rows come last.
struct FixedBinaryLp {
  LpProblem lp;
  double constant = 0.0;
  int coupling_row_offset = 0;
};

inline FixedBinaryLp fix_binaries_lp(const CoupledMilp& inst, const std::vector<BinaryVec>& uhat) {
  if (static_cast<int>(uhat.size()) != inst.num_blocks())
    throw std::invalid_argument("candidate block count mismatch");
  FixedBinaryLp out;
  int n = inst.total_cont();
  out.lp.objective = Vec::Zero(n);
  out.lp.lower.assign(n, -kInf);
  out.lp.upper.assign(n, kInf);
  int off = 0;
  int rows = 0;
  for (int v = 0; v < inst.num_blocks(); ++v) {
    const BlockProblem& b = inst.blocks[v];
    if (static_cast<int>(uhat[v].size()) != b.n_bin)
      throw std::invalid_argument("candidate length mismatch in block " + std::to_string(v + 1));
    Vec uv = binary_to_vec(uhat[v]);
    out.constant += b.cost.head(b.n_bin).dot(uv);
    out.lp.objective.segment(off, b.n_cont) = b.cost.tail(b.n_cont);
    Vec shift = b.E * uv;
    for (int r = 0; r < b.cond_rows(); ++r) {
      LpProblem::Row row;
      row.sense = Sense::LE;
      row.rhs = b.g[r] - shift[r];
      for (int j = 0; j < b.n_cont; ++j)
        if (b.F(r, j) != 0.0) {
          row.idx.push_back(off + j);
          row.val.push_back(b.F(r, j));
        }
      out.lp.rows.push_back(std::move(row));
      ++rows;
    }
    off += b.n_cont;
  }
  out.coupling_row_offset = rows;
  for (int i = 0; i < inst.num_coupling(); ++i) {
    LpProblem::Row row;
    row.sense = Sense::EQ;
    double rhs = inst.rhs[i];
    off = 0;
    for (int v = 0; v < inst.num_blocks(); ++v) {
      const BlockProblem& b = inst.blocks[v];
      rhs -= b.A.row(i).head(b.n_bin).dot(binary_to_vec(uhat[v]));
      for (int j = 0; j < b.n_cont; ++j)
        if (b.A(i, b.n_bin + j) != 0.0) {
          row.idx.push_back(off + j);
          row.val.push_back(b.A(i, b.n_bin + j));
        }
      off += b.n_cont;
    }
    row.rhs = rhs;
    out.lp.rows.push_back(std::move(row));
  }
  return out;
}

/// Enumerate U_v by walking the 0/1 cube and filtering on bin_constraints.
/// Refuses above `guard` candidate patterns.
inline std::vector<BinaryVec> enumerate_block_binaries(const BlockProblem& b,
                                                       std::uint64_t guard = 1u << 20) {
  if (b.n_bin >= 63 || (std::uint64_t{1} << b.n_bin) > guard)
    throw std::runtime_error("binary enumeration guard exceeded for block " +
                             std::to_string(b.block_id) + " (" + std::to_string(b.n_bin) +
                             " binaries)");
  std::vector<BinaryVec> out;
  std::uint64_t count = std::uint64_t{1} << b.n_bin;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    BinaryVec u(static_cast<size_t>(b.n_bin));
    for (int j = 0; j < b.n_bin; ++j) u[static_cast<size_t>(j)] = (bits >> j) & 1u;
    if (b.binaries_feasible(u)) out.push_back(std::move(u));
  }
  return out;
}

/// Enumerate U = U_1 x ... x U_N with a product-size guard.
inline std::vector<std::vector<BinaryVec>> enumerate_global_binaries(const CoupledMilp& inst,
                                                                     std::uint64_t guard = 1u << 20) {
  std::vector<std::vector<BinaryVec>> per_block;
  std::uint64_t prod = 1;
  for (const auto& b : inst.blocks) {
    per_block.push_back(enumerate_block_binaries(b, guard));
    prod *= std::max<std::uint64_t>(per_block.back().size(), 1);
    if (prod > guard) throw std::runtime_error("global binary enumeration guard exceeded");
  }
  std::vector<std::vector<BinaryVec>> out;
  std::vector<size_t> pick(inst.blocks.size(), 0);
  while (true) {
    std::vector<BinaryVec> cand;
    bool empty = false;
    for (size_t v = 0; v < per_block.size(); ++v) {
      if (per_block[v].empty()) {
        empty = true;
        break;
      }
      cand.push_back(per_block[v][pick[v]]);
    }
    if (empty) break;
    out.push_back(std::move(cand));
    int v = static_cast<int>(per_block.size()) - 1;
    while (v >= 0) {
      if (++pick[v] < per_block[v].size()) break;
      pick[v] = 0;
      --v;
    }
    if (v < 0) break;
  }
  return out;
}

inline BinaryVec concat_binaries(const std::vector<BinaryVec>& parts) {
  BinaryVec u;
  for (const auto& p : parts) u.insert(u.end(), p.begin(), p.end());
  return u;
}

inline std::vector<BinaryVec> split_binaries(const CoupledMilp& inst, const BinaryVec& u) {
  std::vector<BinaryVec> parts;
  size_t off = 0;
  for (const auto& b : inst.blocks) {
    parts.emplace_back(u.begin() + off, u.begin() + off + b.n_bin);
    off += b.n_bin;
  }
  return parts;
}

/// The two-block two-coupling-row fixture: commitment-style binaries with
/// box and ramp limits on the continuous pair of each block, demands 90
/// and 120 shared between the blocks.
inline CoupledMilp example1_instance() {
  CoupledMilp inst;
  inst.rhs = Vec(2);
  inst.rhs << 90, 120;

  auto make_block = [](int id, double c_u1, double c_u2, double c_u3, double c_y, double lo,
                       double hi, double ramp) {
    BlockProblem b;
    b.block_id = id;
    b.n_bin = 3;
    b.n_cont = 2;
    b.cost = Vec(5);
    b.cost << c_u1, c_u2, c_u3, c_y, c_y;
    LinearConstraint logic;
    logic.coeffs = Vec(3);
    logic.coeffs << -1, 1, -1;  // u2 <= u1 + u3
    logic.sense = Sense::LE;
    logic.rhs = 0.0;
    b.bin_constraints.push_back(logic);
    b.E = Mat::Zero(6, 3);
    b.F = Mat::Zero(6, 2);
    b.g = Vec::Zero(6);
    // lo*u1 <= y1 <= hi*u1, lo*u2 <= y2 <= hi*u2, |y2 - y1| <= ramp
    b.E(0, 0) = lo;  b.F(0, 0) = -1;
    b.E(1, 0) = -hi; b.F(1, 0) = 1;
    b.E(2, 1) = lo;  b.F(2, 1) = -1;
    b.E(3, 1) = -hi; b.F(3, 1) = 1;
    b.F(4, 0) = -1;  b.F(4, 1) = 1;  b.g[4] = ramp;
    b.F(5, 0) = 1;   b.F(5, 1) = -1; b.g[5] = ramp;
    b.A = Mat::Zero(2, 5);
    b.A(0, 3) = 1;
    b.A(1, 4) = 1;
    return b;
  };
  inst.blocks.push_back(make_block(1, 70, 70, 110, 2, 30, 100, 35));
  inst.blocks.push_back(make_block(2, 48, 48, 52, 3, 20, 80, 30));
  return inst;
}

}  // namespace dmilp
