#pragma once

#include <memory>
#include <vector>

#include "dmilp/bb.hpp"
#include "dmilp/pool.hpp"
#include "dmilp/qp.hpp"

namespace dmilp {

/// X_v as a standalone MILP (no objective set yet).
inline MilpProblem build_block_milp(const BlockProblem& b) {
  MilpProblem p;
  p.lp.objective = Vec::Zero(b.dim());
  p.lp.lower.assign(static_cast<size_t>(b.dim()), -kInf);
  p.lp.upper.assign(static_cast<size_t>(b.dim()), kInf);
  append_block_rows(p.lp, &p.binaries, b, 0);
  return p;
}

struct BlockSolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  double value = kInf;
  Vec x;        // (u, y)
  BinaryVec u;
  Vec coupling;  // A_v x
};

/// Reduced cost for the relaxed-coupling subproblems: c_v - A_v' mu.
inline Vec reduced_cost(const BlockProblem& b, const Vec& mu) {
  return b.cost - b.A.transpose() * mu;
}

/// min { (c_v' - mu' A_v) x : x in X_v }  via branch-and-bound.
/// A persistent solver makes consecutive calls warm (only the objective
/// moves between dual iterations).
class BlockLrSolver {
 public:
  explicit BlockLrSolver(const BlockProblem& b)
      : blk_(b), milp_(build_block_milp(b)), solver_(milp_.lp) {}

  BlockSolveResult solve(const Vec& mu, double int_tol = 1e-6, long node_limit = 2000000) {
    solver_.set_objective(reduced_cost(blk_, mu));
    SolveResult r = solve_milp_with(solver_, milp_.binaries, int_tol, node_limit);
    return package(blk_, r);
  }

  static BlockSolveResult package(const BlockProblem& blk, const SolveResult& r) {
    BlockSolveResult out;
    out.status = r.status;
    if (r.status != SolveStatus::Optimal) return out;
    out.value = r.objective;
    out.x = r.x;
    out.u.resize(static_cast<size_t>(blk.n_bin));
    for (int k = 0; k < blk.n_bin; ++k) out.u[static_cast<size_t>(k)] = r.x[k] > 0.5 ? 1 : 0;
    out.coupling = blk.A * r.x;
    return out;
  }

 private:
  BlockProblem blk_;
  MilpProblem milp_;
  SimplexSolver solver_;
};

inline BlockSolveResult block_lr_subproblem(const BlockProblem& b, const Vec& mu) {
  BlockLrSolver s(b);
  return s.solve(mu);
}

// ---------------------------------------------------------------------------
// Binary-duplication subproblem: the block keeps its own x_v and holds a 0/1
// perception of every other block's binaries. Cuts and foreign feasible-set
// descriptions apply to the perception coordinates.
// ---------------------------------------------------------------------------

struct PerceptionLayout {
  std::vector<int> bin_sizes;  // n_v^1 for every block
  int own = 0;                 // 0-based index of the owning block

  int total() const {
    int s = 0;
    for (int v : bin_sizes) s += v;
    return s;
  }
  int offset(int v) const {
    int s = 0;
    for (int i = 0; i < v; ++i) s += bin_sizes[static_cast<size_t>(i)];
    return s;
  }
};

/// Holds a rebuildable MILP for the duplication subproblem. Constraints
/// change only when cuts arrive; the objective changes every iteration.
class DupSubproblemSolver {
 public:
  DupSubproblemSolver(const BlockProblem& b, PerceptionLayout layout,
                      std::vector<std::vector<LinearConstraint>> foreign_sets)
      : blk_(b), layout_(std::move(layout)), foreign_sets_(std::move(foreign_sets)) {
    rebuild({});
  }

  /// perception coordinate -> variable index in the subproblem
  int perception_var(int coord) const { return perception_var_[static_cast<size_t>(coord)]; }

  void add_cut(const BinaryVec& uhat_full) { cuts_.push_back(uhat_full); dirty_ = true; }
  void add_foreign_exclusion(int v, const BinaryVec& pattern) {
    exclusions_.push_back({v, pattern});
    dirty_ = true;
  }

  struct Result {
    SolveStatus status = SolveStatus::Infeasible;
    double value = kInf;
    Vec x;
    BinaryVec perception;  // full length n^1
    Vec coupling;
  };

  Result solve(const Vec& mu, const Vec& lambda, double int_tol = 1e-6,
               long node_limit = 2000000) {
    if (dirty_) rebuild(cuts_);
    Vec obj = Vec::Zero(milp_.lp.num_vars());
    Vec rc = reduced_cost(blk_, mu);
    obj.head(blk_.dim()) = rc;
    for (int g = 0; g < layout_.total(); ++g) obj[perception_var_[static_cast<size_t>(g)]] += lambda[g];
    solver_->set_objective(obj);
    SolveResult r = solve_milp_with(*solver_, milp_.binaries, int_tol, node_limit);
    Result out;
    out.status = r.status;
    if (r.status != SolveStatus::Optimal) return out;
    out.value = r.objective;
    out.x = r.x.head(blk_.dim());
    out.coupling = blk_.A * out.x;
    out.perception.resize(static_cast<size_t>(layout_.total()));
    for (int g = 0; g < layout_.total(); ++g)
      out.perception[static_cast<size_t>(g)] = r.x[perception_var_[static_cast<size_t>(g)]] > 0.5;
    return out;
  }

 private:
  BlockProblem blk_;
  PerceptionLayout layout_;
  std::vector<std::vector<LinearConstraint>> foreign_sets_;  // per block; own entry unused
  std::vector<BinaryVec> cuts_;
  std::vector<std::pair<int, BinaryVec>> exclusions_;  // alert mode: (block, pattern)
  MilpProblem milp_;
  std::vector<int> perception_var_;
  std::unique_ptr<SimplexSolver> solver_;
  bool dirty_ = false;

  void rebuild(const std::vector<BinaryVec>& cuts) {
    milp_ = MilpProblem{};
    int own_dim = blk_.dim();
    int extra = layout_.total() - layout_.bin_sizes[static_cast<size_t>(layout_.own)];
    int n = own_dim + extra;
    milp_.lp.objective = Vec::Zero(n);
    milp_.lp.lower.assign(static_cast<size_t>(n), -kInf);
    milp_.lp.upper.assign(static_cast<size_t>(n), kInf);
    append_block_rows(milp_.lp, &milp_.binaries, blk_, 0);
    perception_var_.assign(static_cast<size_t>(layout_.total()), -1);
    // own slice aliases the block's own u variables
    int own_off = layout_.offset(layout_.own);
    for (int k = 0; k < blk_.n_bin; ++k) perception_var_[static_cast<size_t>(own_off + k)] = k;
    int next = own_dim;
    for (size_t v = 0; v < layout_.bin_sizes.size(); ++v) {
      if (static_cast<int>(v) == layout_.own) continue;
      int off = layout_.offset(static_cast<int>(v));
      for (int k = 0; k < layout_.bin_sizes[v]; ++k) {
        milp_.lp.lower[static_cast<size_t>(next)] = 0.0;
        milp_.lp.upper[static_cast<size_t>(next)] = 1.0;
        milp_.binaries.push_back(next);
        perception_var_[static_cast<size_t>(off + k)] = next++;
      }
      // foreign feasible-set rows on the perception coordinates
      if (v < foreign_sets_.size())
        for (const auto& c : foreign_sets_[v]) {
          LpProblem::Row row;
          row.sense = c.sense;
          row.rhs = c.rhs;
          for (int k = 0; k < layout_.bin_sizes[v]; ++k)
            if (c.coeffs[k] != 0.0) {
              row.idx.push_back(perception_var_[static_cast<size_t>(off + k)]);
              row.val.push_back(c.coeffs[k]);
            }
          milp_.lp.rows.push_back(std::move(row));
        }
    }
    // learned foreign exclusions (alert mode)
    for (const auto& [v, pattern] : exclusions_) {
      LinearConstraint c = sbc_cut(pattern);
      LpProblem::Row row;
      row.sense = c.sense;
      row.rhs = c.rhs;
      int off = layout_.offset(v);
      for (int k = 0; k < layout_.bin_sizes[static_cast<size_t>(v)]; ++k)
        if (c.coeffs[k] != 0.0) {
          row.idx.push_back(perception_var_[static_cast<size_t>(off + k)]);
          row.val.push_back(c.coeffs[k]);
        }
      milp_.lp.rows.push_back(std::move(row));
    }
    // exclusion of every explored global vector, on the full perception
    for (const auto& uhat : cuts) {
      LinearConstraint c = sbc_cut(uhat);
      LpProblem::Row row;
      row.sense = c.sense;
      row.rhs = c.rhs;
      for (int g = 0; g < layout_.total(); ++g)
        if (c.coeffs[g] != 0.0) {
          row.idx.push_back(perception_var_[static_cast<size_t>(g)]);
          row.val.push_back(c.coeffs[g]);
        }
      milp_.lp.rows.push_back(std::move(row));
    }
    solver_ = std::make_unique<SimplexSolver>(milp_.lp);
    dirty_ = false;
  }
};

// ---------------------------------------------------------------------------
// Auxiliary-binary subproblem: selection variables w_{v,v',l} over pool
// indices replace foreign binary knowledge entirely.
// ---------------------------------------------------------------------------

struct AuxLayout {
  std::vector<int> sizes;  // |S_v'| per block

  int groups() const { return static_cast<int>(sizes.size()); }
  int length() const {
    int s = groups();
    for (int v : sizes) s += v;
    return s;
  }
  /// flat index of w_{.,v,l} with l in 0..sizes[v]
  int windex(int v, int l) const {
    int off = 0;
    for (int i = 0; i < v; ++i) off += sizes[static_cast<size_t>(i)] + 1;
    return off + l;
  }
};

/// Constraint rows for one block's auxiliary-selection system, expressed
/// over [u_v vars at offset 0 .. n_bin) and [w vars at w_offset ..).
/// `strengthened` picks the N-1 form of the pool cuts; the complement form
/// is kept for the equivalence tests.
inline std::vector<LpProblem::Row> build_aux_constraints(
    const BlockProblem& blk, int own, const std::vector<BinaryVec>& own_members,
    const AuxLayout& layout, const std::vector<std::vector<int>>& cut_tuples, int w_offset,
    bool strengthened = true) {
  std::vector<LpProblem::Row> rows;
  const int N = layout.groups();
  // (20) linking between u_v and the own-selection variables
  for (size_t l = 0; l < own_members.size(); ++l) {
    int w = w_offset + layout.windex(own, static_cast<int>(l) + 1);
    for (int k = 0; k < blk.n_bin; ++k) {
      LpProblem::Row r;
      if (own_members[l][static_cast<size_t>(k)]) {
        r.idx = {k, w};
        r.val = {1.0, -1.0};
        r.sense = Sense::GE;
        r.rhs = 0.0;  // u_k >= w
      } else {
        r.idx = {k, w};
        r.val = {1.0, 1.0};
        r.sense = Sense::LE;
        r.rhs = 1.0;  // u_k <= 1 - w
      }
      rows.push_back(std::move(r));
    }
  }
  // (21) the no-match flag forces disagreement with every pooled vector
  for (size_t l = 0; l < own_members.size(); ++l) {
    LpProblem::Row r;
    int ones = 0;
    for (int k = 0; k < blk.n_bin; ++k) {
      if (own_members[l][static_cast<size_t>(k)]) {
        r.idx.push_back(k);
        r.val.push_back(-1.0);
        ++ones;
      } else {
        r.idx.push_back(k);
        r.val.push_back(1.0);
      }
    }
    r.idx.push_back(w_offset + layout.windex(own, 0));
    r.val.push_back(-1.0);
    r.sense = Sense::GE;
    r.rhs = static_cast<double>(-ones);
    rows.push_back(std::move(r));
  }
  // (22) exactly one selection per block group
  for (int v = 0; v < N; ++v) {
    LpProblem::Row r;
    for (int l = 0; l <= layout.sizes[static_cast<size_t>(v)]; ++l) {
      r.idx.push_back(w_offset + layout.windex(v, l));
      r.val.push_back(1.0);
    }
    r.sense = Sense::EQ;
    r.rhs = 1.0;
    rows.push_back(std::move(r));
  }
  // pool cuts over the selection variables
  for (const auto& tuple : cut_tuples) {
    if (strengthened) {
      // sum of the matching selections <= N-1
      LpProblem::Row r;
      for (int v = 0; v < N; ++v) {
        r.idx.push_back(w_offset + layout.windex(v, tuple[static_cast<size_t>(v)]));
        r.val.push_back(1.0);
      }
      r.sense = Sense::LE;
      r.rhs = static_cast<double>(N - 1);
      rows.push_back(std::move(r));
    } else {
      // complement form: mismatches plus (1 - matches) >= 1
      LpProblem::Row r;
      for (int v = 0; v < N; ++v)
        for (int l = 0; l <= layout.sizes[static_cast<size_t>(v)]; ++l) {
          r.idx.push_back(w_offset + layout.windex(v, l));
          r.val.push_back(l == tuple[static_cast<size_t>(v)] ? -1.0 : 1.0);
        }
      r.sense = Sense::GE;
      r.rhs = static_cast<double>(1 - N);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

class AuxSubproblemSolver {
 public:
  AuxSubproblemSolver(const BlockProblem& b, int own) : blk_(b), own_(own) {}

  void sync_pool(std::vector<BinaryVec> own_members, AuxLayout layout,
                 std::vector<std::vector<int>> cut_tuples) {
    own_members_ = std::move(own_members);
    layout_ = std::move(layout);
    cut_tuples_ = std::move(cut_tuples);
    dirty_ = true;
  }

  const AuxLayout& layout() const { return layout_; }
  const std::vector<BinaryVec>& own_members() const { return own_members_; }

  struct Result {
    SolveStatus status = SolveStatus::Infeasible;
    double value = kInf;
    Vec x;
    BinaryVec w;       // flat, layout order
    BinaryVec own_u;
    Vec coupling;
  };

  Result solve(const Vec& mu, const Vec& gamma, double int_tol = 1e-6,
               long node_limit = 2000000) {
    if (dirty_) rebuild();
    Vec obj = Vec::Zero(milp_.lp.num_vars());
    obj.head(blk_.dim()) = reduced_cost(blk_, mu);
    for (int i = 0; i < layout_.length(); ++i) obj[blk_.dim() + i] = gamma[i];
    solver_->set_objective(obj);
    SolveResult r = solve_milp_with(*solver_, milp_.binaries, int_tol, node_limit);
    Result out;
    out.status = r.status;
    if (r.status != SolveStatus::Optimal) return out;
    out.value = r.objective;
    out.x = r.x.head(blk_.dim());
    out.coupling = blk_.A * out.x;
    out.w.resize(static_cast<size_t>(layout_.length()));
    for (int i = 0; i < layout_.length(); ++i)
      out.w[static_cast<size_t>(i)] = r.x[blk_.dim() + i] > 0.5;
    out.own_u.resize(static_cast<size_t>(blk_.n_bin));
    for (int k = 0; k < blk_.n_bin; ++k) out.own_u[static_cast<size_t>(k)] = r.x[k] > 0.5;
    return out;
  }

 private:
  BlockProblem blk_;
  int own_;
  std::vector<BinaryVec> own_members_;
  AuxLayout layout_;
  std::vector<std::vector<int>> cut_tuples_;
  MilpProblem milp_;
  std::unique_ptr<SimplexSolver> solver_;
  bool dirty_ = true;

  void rebuild() {
    milp_ = MilpProblem{};
    int n = blk_.dim() + layout_.length();
    milp_.lp.objective = Vec::Zero(n);
    milp_.lp.lower.assign(static_cast<size_t>(n), -kInf);
    milp_.lp.upper.assign(static_cast<size_t>(n), kInf);
    append_block_rows(milp_.lp, &milp_.binaries, blk_, 0);
    for (int i = 0; i < layout_.length(); ++i) {
      milp_.lp.lower[static_cast<size_t>(blk_.dim() + i)] = 0.0;
      milp_.lp.upper[static_cast<size_t>(blk_.dim() + i)] = 1.0;
      milp_.binaries.push_back(blk_.dim() + i);
    }
    auto rows = build_aux_constraints(blk_, own_, own_members_, layout_, cut_tuples_, blk_.dim());
    for (auto& r : rows) milp_.lp.rows.push_back(std::move(r));
    solver_ = std::make_unique<SimplexSolver>(milp_.lp);
    dirty_ = false;
  }
};

// ---------------------------------------------------------------------------

/// Feasibility probe: is there a u in U_v outside the listed members?
/// Optionally returns the cheapest such vector under the given objective.
inline std::optional<BinaryVec> fresh_own_binary(const BlockProblem& blk,
                                                 const std::vector<BinaryVec>& excluded,
                                                 const Vec& u_objective) {
  MilpProblem p;
  p.lp.objective = u_objective;
  p.lp.lower.assign(static_cast<size_t>(blk.n_bin), 0.0);
  p.lp.upper.assign(static_cast<size_t>(blk.n_bin), 1.0);
  for (int k = 0; k < blk.n_bin; ++k) p.binaries.push_back(k);
  for (const auto& c : blk.bin_constraints) {
    LpProblem::Row r;
    r.sense = c.sense;
    r.rhs = c.rhs;
    for (int k = 0; k < blk.n_bin; ++k)
      if (c.coeffs[k] != 0.0) {
        r.idx.push_back(k);
        r.val.push_back(c.coeffs[k]);
      }
    p.lp.rows.push_back(std::move(r));
  }
  for (const auto& uhat : excluded) {
    LinearConstraint c = sbc_cut(uhat);
    LpProblem::Row r;
    r.sense = c.sense;
    r.rhs = c.rhs;
    for (int k = 0; k < blk.n_bin; ++k)
      if (c.coeffs[k] != 0.0) {
        r.idx.push_back(k);
        r.val.push_back(c.coeffs[k]);
      }
    p.lp.rows.push_back(std::move(r));
  }
  SolveResult r = solve_milp(p);
  if (r.status != SolveStatus::Optimal) return std::nullopt;
  BinaryVec u(static_cast<size_t>(blk.n_bin));
  for (int k = 0; k < blk.n_bin; ++k) u[static_cast<size_t>(k)] = r.x[k] > 0.5;
  return u;
}

/// Continuous repair after a consensus run: fix the block's own coupling
/// contribution at `target` and re-optimize y inside Y(u). Any optimum,
/// summed across blocks, is feasible for the original problem.
struct RepairResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;  // block objective including the binary share
  Vec y;
};

inline RepairResult repair_to_coupling(const BlockProblem& blk, const BinaryVec& uhat,
                                       const Vec& coupling_target) {
  RepairResult out;
  Vec uv = binary_to_vec(uhat);
  LpProblem p;
  p.objective = blk.cost.tail(blk.n_cont);
  p.lower.assign(static_cast<size_t>(blk.n_cont), -kInf);
  p.upper.assign(static_cast<size_t>(blk.n_cont), kInf);
  Vec shift = blk.g - blk.E * uv;
  for (int r = 0; r < blk.cond_rows(); ++r) {
    LpProblem::Row row;
    row.sense = Sense::LE;
    row.rhs = shift[r];
    for (int j = 0; j < blk.n_cont; ++j)
      if (blk.F(r, j) != 0.0) {
        row.idx.push_back(j);
        row.val.push_back(blk.F(r, j));
      }
    p.rows.push_back(std::move(row));
  }
  Vec target = coupling_target - blk.A.leftCols(blk.n_bin) * uv;
  for (int i = 0; i < blk.A.rows(); ++i) {
    LpProblem::Row row;
    row.sense = Sense::EQ;
    row.rhs = target[i];
    for (int j = 0; j < blk.n_cont; ++j)
      if (blk.A(i, blk.n_bin + j) != 0.0) {
        row.idx.push_back(j);
        row.val.push_back(blk.A(i, blk.n_bin + j));
      }
    p.rows.push_back(std::move(row));
  }
  SolveResult r = solve_lp(p);
  out.status = r.status;
  if (r.status != SolveStatus::Optimal) return out;
  out.y = r.x;
  out.objective = r.objective + blk.cost.head(blk.n_bin).dot(uv);
  return out;
}

}  // namespace dmilp
