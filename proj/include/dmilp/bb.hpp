#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "dmilp/model.hpp"
#include "dmilp/simplex.hpp"

namespace dmilp {

/// Best-first branch-and-bound over the marked binaries, driving an
/// existing solver whose basis warm-starts every node (and the next call,
/// when the caller reuses the solver with a new objective or extra cuts).
/// Branching picks the most fractional variable, lowest index on ties.
/// On return the binary bounds are reset to [0,1].
inline SolveResult solve_milp_with(SimplexSolver& solver, const std::vector<int>& binaries,
                                   double int_tol = 1e-6, long node_limit = 1000000) {
  SolveResult out;
  const int nb = static_cast<int>(binaries.size());

  struct Node {
    double bound;
    long id;
    std::vector<std::int8_t> fix;  // -1 free, 0, 1
  };
  struct Cmp {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };
  std::priority_queue<Node, std::vector<Node>, Cmp> open;
  open.push(Node{-kInf, 0, std::vector<std::int8_t>(static_cast<size_t>(nb), -1)});

  double incumbent = kInf;
  Vec incumbent_x;
  std::vector<std::int8_t> incumbent_fix;
  bool have_inc = false;
  long nodes = 0, next_id = 1;
  bool hit_limit = false, unbounded = false;
  long pivots = 0;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (have_inc && node.bound >= incumbent - 1e-9 * (1.0 + std::abs(incumbent))) continue;
    if (nodes >= node_limit) {
      hit_limit = true;
      break;
    }
    ++nodes;

    for (int k = 0; k < nb; ++k) {
      int var = binaries[k];
      if (node.fix[k] < 0)
        solver.set_bounds(var, 0.0, 1.0);
      else
        solver.set_bounds(var, node.fix[k], node.fix[k]);
    }
    SolveResult rel = solver.solve();
    pivots += rel.stats.iterations;
    if (rel.status == SolveStatus::Infeasible) continue;
    if (rel.status == SolveStatus::Unbounded) {
      unbounded = true;
      break;
    }
    if (rel.status == SolveStatus::IterationLimit) {
      hit_limit = true;
      break;
    }
    if (have_inc && rel.objective >= incumbent - 1e-9 * (1.0 + std::abs(incumbent))) continue;

    int branch = -1;
    double most = int_tol;
    for (int k = 0; k < nb; ++k) {
      double v = rel.x[binaries[k]];
      double away = std::min(std::abs(v), std::abs(1.0 - v));
      if (away > most) {
        most = away;
        branch = k;
      }
    }
    if (branch < 0) {
      // Integral within tolerance: new incumbent.
      incumbent = rel.objective;
      incumbent_x = rel.x;
      incumbent_fix.assign(static_cast<size_t>(nb), 0);
      for (int k = 0; k < nb; ++k)
        incumbent_fix[static_cast<size_t>(k)] = rel.x[binaries[k]] > 0.5 ? 1 : 0;
      have_inc = true;
      continue;
    }
    Node lo{rel.objective, next_id++, node.fix};
    lo.fix[static_cast<size_t>(branch)] = 0;
    Node hi{rel.objective, next_id++, node.fix};
    hi.fix[static_cast<size_t>(branch)] = 1;
    open.push(std::move(lo));
    open.push(std::move(hi));
  }

  if (unbounded) {
    out.status = SolveStatus::Unbounded;
    out.stats.nodes = nodes;
    out.stats.iterations = pivots;
    return out;
  }
  if (have_inc) {
    // Clean re-solve with the incumbent's binaries pinned, so the reported
    // solution is exactly integral.
    for (int k = 0; k < nb; ++k)
      solver.set_bounds(binaries[k], incumbent_fix[static_cast<size_t>(k)],
                        incumbent_fix[static_cast<size_t>(k)]);
    SolveResult fin = solver.solve();
    pivots += fin.stats.iterations;
    if (fin.status == SolveStatus::Optimal) {
      out = fin;
      for (int k = 0; k < nb; ++k) out.x[binaries[k]] = incumbent_fix[static_cast<size_t>(k)];
      out.duals.resize(0);
    } else {
      out.status = SolveStatus::Optimal;
      out.objective = incumbent;
      out.x = incumbent_x;
    }
    out.status = hit_limit ? SolveStatus::IterationLimit : SolveStatus::Optimal;
  } else {
    out.status = hit_limit ? SolveStatus::IterationLimit : SolveStatus::Infeasible;
  }
  for (int k = 0; k < nb; ++k) solver.set_bounds(binaries[k], 0.0, 1.0);
  out.stats.nodes = nodes;
  out.stats.iterations = pivots;
  return out;
}

inline SolveResult solve_milp(const MilpProblem& p, double int_tol = 1e-6,
                              long node_limit = 1000000, double feas_tol = 1e-7) {
  SimplexSolver solver(p.lp, feas_tol);
  return solve_milp_with(solver, p.binaries, int_tol, node_limit);
}

/// Exhaustive reference: enumerate U, solve the fixed-binary completion LP
/// for each member, return the best. z(u) = +inf cases are skipped as
/// infeasible rather than folded into a sentinel value.
struct BruteForceResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;
  std::vector<BinaryVec> ustar;
  MixedSolution solution;
  long candidates = 0;
  long feasible = 0;
};

inline BruteForceResult brute_force_milp(const CoupledMilp& inst, std::uint64_t guard = 1u << 20) {
  BruteForceResult best;
  auto members = enumerate_global_binaries(inst, guard);
  best.candidates = static_cast<long>(members.size());
  for (const auto& uhat : members) {
    FixedBinaryLp lp8 = fix_binaries_lp(inst, uhat);
    SolveResult r = solve_lp(lp8.lp);
    if (r.status != SolveStatus::Optimal) continue;  // z(u) = +inf
    ++best.feasible;
    double z = r.objective + lp8.constant;
    if (z < best.objective) {
      best.objective = z;
      best.status = SolveStatus::Optimal;
      best.ustar = uhat;
      best.solution.u = uhat;
      best.solution.y.clear();
      int off = 0;
      for (const auto& b : inst.blocks) {
        best.solution.y.push_back(r.x.segment(off, b.n_cont));
        off += b.n_cont;
      }
      best.solution.objective = z;
    }
  }
  return best;
}

}  // namespace dmilp
