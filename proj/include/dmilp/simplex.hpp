#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>
#include <vector>

#include "dmilp/lp.hpp"

namespace dmilp {

/// Revised bounded-variable simplex over a dense basis inverse.
///
/// Columns are the n structurals, then one slack and one artificial per
/// row (artificials are pinned to 0 outside phase 1). Warm restarts:
/// objective changes re-enter through the primal algorithm, bound changes
/// and added rows through the dual algorithm.
///
/// Pricing is Dantzig with lowest-index tie-breaking; after 1000
/// non-improving pivots the rule degrades to Bland's until progress
/// resumes, which guarantees termination.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpProblem& p, double feas_tol = 1e-7)
      : feas_tol_(feas_tol) {
    load(p);
  }

  int num_rows() const { return m_; }
  int num_structural() const { return n_; }

  /// Replace the structural objective, keeping the basis.
  void set_objective(const Vec& c) {
    assert(c.size() == n_);
    for (int j = 0; j < n_; ++j) cost_[j] = c[j];
  }

  /// Change one structural variable's bounds, keeping the basis.
  void set_bounds(int var, double lo, double hi) {
    assert(var >= 0 && var < n_);
    lo_[var] = lo;
    hi_[var] = hi;
    if (pos_[var] < 0) {
      double v = x_[var];
      if (state_[var] == VarState::AtLower) v = lo;
      if (state_[var] == VarState::AtUpper) v = hi;
      v = std::min(std::max(v, lo), hi);
      if (lo == hi) {
        state_[var] = VarState::AtLower;
        v = lo;
      } else if (v == lo && lo != -kInf) {
        state_[var] = VarState::AtLower;
      } else if (v == hi && hi != kInf) {
        state_[var] = VarState::AtUpper;
      } else if (lo == -kInf && hi == kInf) {
        state_[var] = VarState::FreeZero;
        v = 0.0;
      }
      x_[var] = v;
    }
    values_stale_ = true;
  }

  double lower_bound_of(int var) const { return lo_[var]; }
  double upper_bound_of(int var) const { return hi_[var]; }

  /// Append a constraint row. The new slack starts basic; a violated row
  /// is repaired by the dual algorithm on the next solve().
  void add_row(const LpProblem::Row& r) {
    int i = m_;
    rows_.push_back(r);
    ++m_;
    int slack = alloc_col(false);
    int artif = alloc_col(true);
    slack_of_row_.push_back(slack);
    artif_of_row_.push_back(artif);
    for (size_t k = 0; k < r.idx.size(); ++k) cols_[r.idx[k]].push_back({i, r.val[k]});
    cols_[slack].push_back({i, 1.0});
    cols_[artif].push_back({i, 1.0});
    set_slack_bounds(slack, r.sense);
    rhs_.conservativeResize(m_);
    rhs_[m_ - 1] = r.rhs;

    // Border update of the basis inverse with the new slack basic.
    Mat nb = Mat::Zero(m_, m_);
    nb.topLeftCorner(m_ - 1, m_ - 1) = binv_;
    Vec rb = Vec::Zero(m_ - 1);
    for (size_t k = 0; k < r.idx.size(); ++k) {
      int p = pos_[r.idx[k]];
      if (p >= 0) rb[p] = r.val[k];
    }
    nb.block(m_ - 1, 0, 1, m_ - 1) = -(rb.transpose() * binv_);
    nb(m_ - 1, m_ - 1) = 1.0;
    binv_ = std::move(nb);
    basis_.push_back(slack);
    pos_[slack] = m_ - 1;
    state_[slack] = VarState::Basic;
    values_stale_ = true;
  }

  /// Solve from the current basis. Dispatches to primal, dual, or
  /// phase 1 + primal depending on what the warm basis violates. A result
  /// that fails the consistency check triggers a cold reload; warm-start
  /// drift can otherwise corrupt the basis inverse silently.
  SolveResult solve(long iter_limit = 1000000) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      SolveResult r = solve_once(iter_limit);
      if (r.status != SolveStatus::Optimal) return r;
      bool ok = std::isfinite(r.objective) && primal_feasible() &&
                equation_residual() <= 1e-6 * (1.0 + rhs_scale());
      if (ok) return r;
      reload();
    }
    return solve_once(iter_limit);
  }

  /// Row duals for the current basis.
  Vec row_duals() const {
    Vec cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
    return binv_.transpose() * cb;
  }

  Vec primal_values() const {
    Vec v(n_);
    for (int j = 0; j < n_; ++j) v[j] = x_[j];
    return v;
  }

  double objective_value() const {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
    return z;
  }

  /// Bounded-LP dual objective at the current basis (for the weak-duality
  /// checks in the tests).
  double dual_objective() const {
    Vec y = row_duals();
    double g = y.dot(rhs_);
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
      double d = cost_[j] - col_dot(j, y);
      if (d > 1e-12) {
        if (lo_[j] == -kInf) return -kInf;
        g += d * lo_[j];
      } else if (d < -1e-12) {
        if (hi_[j] == kInf) return -kInf;
        g += d * hi_[j];
      }
    }
    return g;
  }

  /// Max violation of the row equations at the current values.
  double equation_residual() const {
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      double a = rhs_[i];
      for (size_t k = 0; k < rows_[i].idx.size(); ++k) a -= rows_[i].val[k] * x_[rows_[i].idx[k]];
      a -= x_[slack_of_row_[i]] + x_[artif_of_row_[i]];
      worst = std::max(worst, std::abs(a));
    }
    return worst;
  }

  long pivots() const { return total_pivots_; }

 private:
  enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr int kBlandTrigger = 1000;

  double feas_tol_;
  int n_ = 0, m_ = 0, total_ = 0;
  std::vector<LpProblem::Row> rows_;
  Vec rhs_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost_, lo_, hi_, x_;
  std::vector<VarState> state_;
  std::vector<char> is_artif_;
  std::vector<int> basis_, pos_, slack_of_row_, artif_of_row_;
  Mat binv_;
  bool values_stale_ = true;
  long total_pivots_ = 0, refactors_ = 0;

  SolveResult solve_once(long iter_limit) {
    SolveResult res;
    if (bound_conflict()) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    recompute_values();
    long used = 0;
    if (!primal_feasible()) {
      SolveStatus st;
      if (dual_feasible()) {
        st = dual_iterate(iter_limit, used);
        if (st == SolveStatus::Infeasible) return finish(res, st, used);
      } else {
        st = phase1(iter_limit, used);
        if (st != SolveStatus::Optimal) return finish(res, st, used);
      }
      if (st == SolveStatus::IterationLimit) return finish(res, st, used);
    }
    SolveStatus st = primal_iterate(iter_limit, used, /*phase1=*/false);
    return finish(res, st, used);
  }

  /// Cold restart: rebuild columns and basis from the live row/bound data.
  void reload() {
    LpProblem p;
    p.objective = Vec(n_);
    for (int j = 0; j < n_; ++j) p.objective[j] = cost_[j];
    p.lower.assign(lo_.begin(), lo_.begin() + n_);
    p.upper.assign(hi_.begin(), hi_.begin() + n_);
    p.rows = rows_;
    load(p);
  }

  int alloc_col(bool artificial) {
    cols_.emplace_back();
    cost_.push_back(0.0);
    lo_.push_back(0.0);
    hi_.push_back(0.0);
    x_.push_back(0.0);
    state_.push_back(VarState::AtLower);
    pos_.push_back(-1);
    is_artif_.push_back(artificial ? 1 : 0);
    return total_++;
  }

  void set_slack_bounds(int slack, Sense s) {
    switch (s) {
      case Sense::LE: lo_[slack] = 0.0; hi_[slack] = kInf; break;
      case Sense::EQ: lo_[slack] = 0.0; hi_[slack] = 0.0; break;
      case Sense::GE: lo_[slack] = -kInf; hi_[slack] = 0.0; break;
    }
  }

  void load(const LpProblem& p) {
    n_ = p.num_vars();
    m_ = p.num_rows();
    total_ = 0;
    cols_.clear();
    cost_.clear();
    lo_.clear();
    hi_.clear();
    x_.clear();
    state_.clear();
    pos_.clear();
    is_artif_.clear();
    rows_ = p.rows;
    rhs_.resize(m_);
    for (int j = 0; j < n_; ++j) {
      alloc_col(false);
      cost_[j] = p.objective[j];
      lo_[j] = p.lower[j];
      hi_[j] = p.upper[j];
    }
    slack_of_row_.clear();
    artif_of_row_.clear();
    for (int i = 0; i < m_; ++i) {
      int slack = alloc_col(false);
      int artif = alloc_col(true);
      slack_of_row_.push_back(slack);
      artif_of_row_.push_back(artif);
      set_slack_bounds(slack, rows_[i].sense);
      rhs_[i] = rows_[i].rhs;
      cols_[slack].push_back({i, 1.0});
      cols_[artif].push_back({i, 1.0});
    }
    for (int i = 0; i < m_; ++i)
      for (size_t k = 0; k < rows_[i].idx.size(); ++k)
        cols_[rows_[i].idx[k]].push_back({i, rows_[i].val[k]});

    for (int j = 0; j < n_; ++j) {
      if (lo_[j] != -kInf) {
        state_[j] = VarState::AtLower;
        x_[j] = lo_[j];
      } else if (hi_[j] != kInf) {
        state_[j] = VarState::AtUpper;
        x_[j] = hi_[j];
      } else {
        state_[j] = VarState::FreeZero;
        x_[j] = 0.0;
      }
    }
    basis_.assign(m_, -1);
    binv_ = Mat::Identity(m_, m_);
    for (int i = 0; i < m_; ++i) {
      int s = slack_of_row_[i];
      basis_[i] = s;
      pos_[s] = i;
      state_[s] = VarState::Basic;
    }
    values_stale_ = true;
  }

  bool bound_conflict() const {
    for (int j = 0; j < n_; ++j)
      if (lo_[j] > hi_[j]) return true;
    return false;
  }

  double col_dot(int j, const Vec& y) const {
    double a = 0.0;
    for (auto [i, v] : cols_[j]) a += v * y[i];
    return a;
  }

  Vec ftran(int j) const {
    Vec w = Vec::Zero(m_);
    for (auto [i, v] : cols_[j]) w += v * binv_.col(i);
    return w;
  }

  void recompute_values() {
    Vec acc = rhs_;
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || x_[j] == 0.0) continue;
      for (auto [i, v] : cols_[j]) acc[i] -= v * x_[j];
    }
    Vec xb = binv_ * acc;
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
    values_stale_ = false;
  }

  void refactorize() {
    Mat b(m_, m_);
    b.setZero();
    for (int i = 0; i < m_; ++i)
      for (auto [r, v] : cols_[basis_[i]]) b(r, i) = v;
    Eigen::PartialPivLU<Mat> lu(b.transpose());
    // binv_ * B = I  =>  binv_ = inv(B); solve B^T X^T = I.
    binv_ = lu.solve(Mat::Identity(m_, m_)).transpose();
    ++refactors_;
    recompute_values();
  }

  bool primal_feasible() const {
    for (int i = 0; i < m_; ++i) {
      int j = basis_[i];
      if (x_[j] < lo_[j] - feas_tol_ || x_[j] > hi_[j] + feas_tol_) return false;
    }
    return true;
  }

  bool dual_feasible() const {
    Vec y = row_duals();
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
      double d = cost_[j] - col_dot(j, y);
      switch (state_[j]) {
        case VarState::AtLower:
          if (d < -1e-7) return false;
          break;
        case VarState::AtUpper:
          if (d > 1e-7) return false;
          break;
        case VarState::FreeZero:
          if (std::abs(d) > 1e-7) return false;
          break;
        default: break;
      }
    }
    return true;
  }

  void pivot(int entering, int row, const Vec& w) {
    int leaving = basis_[row];
    pos_[leaving] = -1;
    basis_[row] = entering;
    pos_[entering] = row;
    state_[entering] = VarState::Basic;
    binv_.row(row) /= w[row];
    Vec col = w;
    col[row] = 0.0;
    binv_.noalias() -= col * binv_.row(row);
    ++total_pivots_;
  }

  double rhs_scale() const { return m_ == 0 ? 0.0 : rhs_.cwiseAbs().maxCoeff(); }

  void maybe_refactor() {
    if (m_ == 0 || total_pivots_ % 512 != 0) return;
    if (equation_residual() > 1e-7 * (1.0 + rhs_scale())) refactorize();
  }

  SolveResult& finish(SolveResult& res, SolveStatus st, long used) {
    res.status = st;
    res.stats.iterations = used;
    res.stats.refactorizations = refactors_;
    if (st == SolveStatus::Optimal || st == SolveStatus::IterationLimit) {
      res.x = primal_values();
      res.objective = objective_value();
      res.duals = row_duals();
    }
    return res;
  }

  // ---- phase 1 -----------------------------------------------------------

  SolveStatus phase1(long iter_limit, long& used) {
    recompute_values();
    std::vector<double> saved_cost(cost_);
    for (int j = 0; j < total_; ++j) cost_[j] = 0.0;
    bool any = false;
    for (int i = 0; i < m_; ++i) {
      int j = basis_[i];
      double v = x_[j];
      if (v >= lo_[j] - feas_tol_ && v <= hi_[j] + feas_tol_) continue;
      any = true;
      if (!is_artif_[j]) {
        // Move the excess onto the row's artificial and pivot it in.
        int a = artif_of_row_[i];
        Vec w = ftran(a);
        if (std::abs(w[i]) < kPivotTol) {
          refactorize();
          w = ftran(a);
        }
        double target = v < lo_[j] ? lo_[j] : hi_[j];
        x_[j] = target;
        state_[j] = target == lo_[j] ? VarState::AtLower : VarState::AtUpper;
        pivot(a, i, w);
        recompute_values();
      }
      int aa = basis_[i];
      if (x_[aa] > 0) {
        lo_[aa] = 0.0;
        hi_[aa] = kInf;
        cost_[aa] = 1.0;
      } else {
        lo_[aa] = -kInf;
        hi_[aa] = 0.0;
        cost_[aa] = -1.0;
      }
    }
    SolveStatus st = SolveStatus::Optimal;
    if (any) st = primal_iterate(iter_limit, used, /*phase1=*/true);
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i) infeas += cost_[basis_[i]] * x_[basis_[i]];
    cost_ = saved_cost;
    for (int j = 0; j < total_; ++j) {
      if (!is_artif_[j]) continue;
      lo_[j] = hi_[j] = 0.0;
      if (pos_[j] < 0) {
        state_[j] = VarState::AtLower;
        x_[j] = 0.0;
      }
    }
    if (st == SolveStatus::IterationLimit) return st;
    if (any && infeas > feas_tol_ * (1.0 + rhs_scale()))
      return SolveStatus::Infeasible;
    drive_out_artificials();
    recompute_values();
    return SolveStatus::Optimal;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      int a = basis_[i];
      if (!is_artif_[a]) continue;
      Vec rho = binv_.row(i).transpose();
      int pick = -1;
      double best = 1e-7;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0 || is_artif_[j] || lo_[j] == hi_[j]) continue;
        double alpha = std::abs(col_dot(j, rho));
        if (alpha > best) {
          best = alpha;
          pick = j;
          if (alpha > 0.1) break;
        }
      }
      if (pick < 0) continue;  // redundant row; artificial stays pinned at 0
      Vec w = ftran(pick);
      pivot(pick, i, w);  // degenerate swap at value 0
      state_[a] = VarState::AtLower;
      x_[a] = 0.0;
    }
  }

  // ---- primal algorithm ----------------------------------------------------

  SolveStatus primal_iterate(long iter_limit, long& used, bool phase1) {
    if (values_stale_) recompute_values();
    long stall = 0;
    int guard_trips = 0;
    while (true) {
      if (used >= iter_limit) return SolveStatus::IterationLimit;
      bool bland = stall > kBlandTrigger;
      Vec y = row_duals();
      int enter = -1, dir = 0;
      double best = kDualTol;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
        double d = cost_[j] - col_dot(j, y);
        int cand = 0;
        double score = 0.0;
        if ((state_[j] == VarState::AtLower || state_[j] == VarState::FreeZero) && d < -kDualTol) {
          cand = +1;
          score = -d;
        } else if ((state_[j] == VarState::AtUpper || state_[j] == VarState::FreeZero) && d > kDualTol) {
          cand = -1;
          score = d;
        }
        if (!cand) continue;
        if (bland) {
          enter = j;
          dir = cand;
          break;
        }
        if (score > best) {
          best = score;
          enter = j;
          dir = cand;
        }
      }
      if (enter < 0) return SolveStatus::Optimal;

      Vec w = ftran(enter);
      double step = (state_[enter] == VarState::FreeZero) ? kInf : hi_[enter] - lo_[enter];
      int leave_row = -1;
      for (int i = 0; i < m_; ++i) {
        double wi = w[i];
        if (std::abs(wi) < kPivotTol) continue;
        int bj = basis_[i];
        double delta = -dir * wi;  // basic value change per unit step
        double t;
        if (delta > 0) {
          if (hi_[bj] == kInf) continue;
          t = (hi_[bj] - x_[bj]) / delta;
        } else {
          if (lo_[bj] == -kInf) continue;
          t = (lo_[bj] - x_[bj]) / delta;
        }
        if (t < 0) t = 0.0;
        bool better = t < step - 1e-12;
        bool tie = !better && t < step + 1e-12 && leave_row >= 0 && bj < basis_[leave_row];
        bool tie_vs_flip = !better && t < step + 1e-12 && leave_row < 0 && step != kInf &&
                           std::abs(t - step) <= 1e-12;
        if (better || tie || tie_vs_flip) {
          step = std::min(step, t);
          leave_row = i;
        }
      }
      if (leave_row < 0 && step == kInf) return phase1 ? SolveStatus::Infeasible : SolveStatus::Unbounded;
      if (leave_row >= 0 && std::abs(w[leave_row]) < 1e-10) {
        // Too small to pivot on; refresh the factorization and retry.
        if (++guard_trips > 5) return SolveStatus::IterationLimit;
        refactorize();
        continue;
      }

      ++used;
      if (best * step <= 1e-12) ++stall; else stall = 0;
      guard_trips = 0;

      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * step * w[i];
      if (leave_row < 0) {
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        state_[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
      } else {
        int lv = basis_[leave_row];
        double lv_target = (-dir * w[leave_row]) > 0 ? hi_[lv] : lo_[lv];
        x_[enter] += dir * step;
        pivot(enter, leave_row, w);
        x_[lv] = lv_target;
        state_[lv] = lv_target == lo_[lv] ? VarState::AtLower : VarState::AtUpper;
      }
      maybe_refactor();
    }
  }

  // ---- dual algorithm ------------------------------------------------------

  SolveStatus dual_iterate(long iter_limit, long& used) {
    if (values_stale_) recompute_values();
    long stall = 0;
    int guard_trips = 0;
    while (true) {
      if (used >= iter_limit) return SolveStatus::IterationLimit;
      bool bland = stall > kBlandTrigger;
      int row = -1;
      bool above = false;
      double worst = feas_tol_;
      for (int i = 0; i < m_; ++i) {
        int j = basis_[i];
        double below_v = lo_[j] - x_[j];
        double above_v = x_[j] - hi_[j];
        double v = std::max(below_v, above_v);
        if (v > worst) {
          worst = v;
          row = i;
          above = above_v > below_v;
          if (bland) break;
        }
      }
      if (row < 0) return SolveStatus::Optimal;

      Vec y = row_duals();
      Vec rho = binv_.row(row).transpose();
      int enter = -1;
      double best_theta = kInf;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
        double alpha = col_dot(j, rho);
        if (std::abs(alpha) < kPivotTol) continue;
        bool ok;
        if (above)
          ok = ((state_[j] == VarState::AtLower || state_[j] == VarState::FreeZero) && alpha > 0) ||
               ((state_[j] == VarState::AtUpper || state_[j] == VarState::FreeZero) && alpha < 0);
        else
          ok = ((state_[j] == VarState::AtLower || state_[j] == VarState::FreeZero) && alpha < 0) ||
               ((state_[j] == VarState::AtUpper || state_[j] == VarState::FreeZero) && alpha > 0);
        if (!ok) continue;
        double d = cost_[j] - col_dot(j, y);
        double theta = std::abs(d) / std::abs(alpha);
        if (theta < best_theta - 1e-12 ||
            (theta < best_theta + 1e-12 && (enter < 0 || j < enter))) {
          best_theta = std::min(theta, best_theta);
          enter = j;
        }
      }
      if (enter < 0) return SolveStatus::Infeasible;  // dual ray

      Vec w = ftran(enter);
      int lv = basis_[row];
      double target = above ? hi_[lv] : lo_[lv];
      if (std::abs(w[row]) < 1e-10 || std::abs(x_[lv] - target) / std::abs(w[row]) > 1e13) {
        if (++guard_trips > 5) return SolveStatus::IterationLimit;
        refactorize();
        continue;
      }
      double delta = (x_[lv] - target) / w[row];
      ++used;
      guard_trips = 0;
      if (std::abs(delta) <= 1e-12) ++stall; else stall = 0;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= delta * w[i];
      x_[enter] += delta;
      pivot(enter, row, w);
      x_[lv] = target;
      state_[lv] = target == lo_[lv] ? VarState::AtLower : VarState::AtUpper;
      maybe_refactor();
    }
  }
};

/// One-shot LP solve; `tol` is the primal feasibility tolerance.
inline SolveResult solve_lp(const LpProblem& p, double tol = 1e-7, long iter_limit = 1000000) {
  SimplexSolver s(p, tol);
  return s.solve(iter_limit);
}

}  // namespace dmilp
