#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "dmilp/lp.hpp"
#include "dmilp/simplex.hpp"

namespace dmilp {

/// Strictly convex QP:  min 1/2 x'Gx + a'x  over rows and bounds.
/// G must be positive definite (the consensus subproblems have G = rho*I,
/// the two-block ones rho*A'A plus a proximal ridge).
struct QpProblem {
  Mat G;
  Vec a;
  std::vector<LpProblem::Row> rows;
  std::vector<double> lower, upper;

  int num_vars() const { return static_cast<int>(a.size()); }
};

struct QpResult {
  SolveStatus status = SolveStatus::Infeasible;
  Vec x;
  double objective = kInf;
  long iterations = 0;
};

/// Primal active-set method. Constraints are normalized to c'x >= d with
/// equalities pinned. The previous solution warm-starts the next solve
/// when only the linear term changes (the consensus-step hot path).
class ActiveSetQp {
 public:
  explicit ActiveSetQp(const QpProblem& p) : n_(p.num_vars()), a_(p.a) {
    llt_.compute(p.G);
    auto push = [this](const Vec& c, double d, bool eq) {
      normals_.push_back(c);
      rhs_.push_back(d);
      is_eq_.push_back(eq ? 1 : 0);
    };
    for (const auto& r : p.rows) {
      Vec c = Vec::Zero(n_);
      for (size_t k = 0; k < r.idx.size(); ++k) c[r.idx[k]] = r.val[k];
      switch (r.sense) {
        case Sense::GE: push(c, r.rhs, false); break;
        case Sense::LE: push(-c, -r.rhs, false); break;
        case Sense::EQ: push(c, r.rhs, true); break;
      }
    }
    for (int j = 0; j < n_; ++j) {
      double lo = p.lower.empty() ? -kInf : p.lower[j];
      double hi = p.upper.empty() ? kInf : p.upper[j];
      Vec c = Vec::Zero(n_);
      c[j] = 1.0;
      if (lo != -kInf && lo == hi) {
        push(c, lo, true);
        continue;
      }
      if (lo != -kInf) push(c, lo, false);
      if (hi != kInf) push(-c, -hi, false);
    }
  }

  void set_linear_term(const Vec& a) { a_ = a; }
  int num_constraints() const { return static_cast<int>(normals_.size()); }

  /// Feasible point via the LP kernel's phase 1 (zero objective).
  bool find_feasible(Vec& x0) const {
    LpProblem p;
    p.objective = Vec::Zero(n_);
    p.lower.assign(static_cast<size_t>(n_), -kInf);
    p.upper.assign(static_cast<size_t>(n_), kInf);
    for (size_t i = 0; i < normals_.size(); ++i) {
      LpProblem::Row r;
      r.sense = is_eq_[i] ? Sense::EQ : Sense::GE;
      r.rhs = rhs_[i];
      for (int j = 0; j < n_; ++j)
        if (normals_[i][j] != 0.0) {
          r.idx.push_back(j);
          r.val.push_back(normals_[i][j]);
        }
      p.rows.push_back(std::move(r));
    }
    SolveResult r = solve_lp(p);
    if (r.status != SolveStatus::Optimal) return false;
    x0 = r.x;
    return true;
  }

  QpResult solve(const Vec* warm_x = nullptr, const std::vector<int>* warm_active = nullptr,
                 long cap = 0) {
    QpResult out;
    Vec x;
    if (warm_x && feasible(*warm_x)) {
      x = *warm_x;
    } else if (!find_feasible(x)) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    const int mc = num_constraints();
    if (cap <= 0) cap = 60L * (n_ + mc) + 200;

    std::vector<int> active;
    std::vector<char> in_active(static_cast<size_t>(mc), 0);
    auto activate = [&](int i) {
      active.push_back(i);
      in_active[static_cast<size_t>(i)] = 1;
    };
    for (int i = 0; i < mc; ++i)
      if (is_eq_[i]) activate(i);
    if (warm_active)
      for (int i : *warm_active)
        if (i >= 0 && i < mc && !in_active[static_cast<size_t>(i)] &&
            std::abs(normals_[static_cast<size_t>(i)].dot(x) - rhs_[static_cast<size_t>(i)]) < 1e-8)
          activate(i);

    long zero_steps = 0;
    for (long it = 0; it < cap; ++it) {
      ++out.iterations;
      Vec grad = gradient(x);
      Vec p, lam;
      if (!kkt_solve(active, grad, p, lam)) {
        prune_dependent(active, in_active);
        if (!kkt_solve(active, grad, p, lam)) {
          out.status = SolveStatus::IterationLimit;  // degenerate beyond repair
          out.x = x;
          out.objective = objective(x);
          return out;
        }
      }
      double xscale = 1.0 + x.cwiseAbs().maxCoeff();
      if (p.cwiseAbs().maxCoeff() <= 1e-10 * xscale) {
        int drop = -1;
        double most = -1e-9;
        bool bland = zero_steps > 2L * (n_ + mc);
        for (size_t k = 0; k < active.size(); ++k) {
          int i = active[k];
          if (is_eq_[static_cast<size_t>(i)]) continue;
          double lk = lam[static_cast<long>(k)];
          if (lk < most) {
            most = lk;
            drop = static_cast<int>(k);
            if (bland) break;  // lowest-index eligible under the fallback rule
          }
        }
        if (drop < 0) {
          out.status = SolveStatus::Optimal;
          out.x = x;
          out.objective = objective(x);
          last_x_ = x;
          last_active_ = active;
          return out;
        }
        in_active[static_cast<size_t>(active[static_cast<size_t>(drop)])] = 0;
        active.erase(active.begin() + drop);
        ++zero_steps;
        continue;
      }
      double alpha = 1.0;
      int blocker = -1;
      for (int i = 0; i < mc; ++i) {
        if (in_active[static_cast<size_t>(i)]) continue;
        double cp = normals_[static_cast<size_t>(i)].dot(p);
        if (cp >= -1e-11) continue;
        double slack = normals_[static_cast<size_t>(i)].dot(x) - rhs_[static_cast<size_t>(i)];
        double t = std::max(slack, 0.0) / (-cp);
        if (t < alpha - 1e-12 || (blocker >= 0 && t < alpha + 1e-12 && i < blocker)) {
          alpha = std::min(alpha, t);
          blocker = i;
        }
      }
      if (alpha > 1e-12) zero_steps = 0; else ++zero_steps;
      x += alpha * p;
      if (blocker >= 0) activate(blocker);
    }
    out.status = SolveStatus::IterationLimit;
    out.x = x;
    out.objective = objective(x);
    return out;
  }

  const Vec& last_x() const { return last_x_; }
  const std::vector<int>& last_active() const { return last_active_; }

  bool feasible(const Vec& x, double tol = 1e-7) const {
    if (x.size() != n_) return false;
    for (size_t i = 0; i < normals_.size(); ++i) {
      double s = normals_[i].dot(x) - rhs_[i];
      if (is_eq_[i] ? std::abs(s) > tol : s < -tol) return false;
    }
    return true;
  }

  double objective(const Vec& x) const { return 0.5 * x.dot(gmul(x)) + a_.dot(x); }

 private:
  int n_;
  Vec a_;
  Eigen::LLT<Mat> llt_;
  std::vector<Vec> normals_;
  std::vector<double> rhs_;
  std::vector<char> is_eq_;
  Vec last_x_;
  std::vector<int> last_active_;

  Vec gmul(const Vec& x) const { return llt_.matrixL() * (llt_.matrixU() * x); }
  Vec gradient(const Vec& x) const { return gmul(x) + a_; }

  void prune_dependent(std::vector<int>& active, std::vector<char>& in_active) const {
    std::vector<int> keep;
    Mat cols(n_, static_cast<int>(active.size()));
    int r = 0;
    for (int i : active) {
      cols.col(r) = normals_[static_cast<size_t>(i)];
      Eigen::ColPivHouseholderQR<Mat> qr(cols.leftCols(r + 1));
      if (qr.rank() == r + 1 || is_eq_[static_cast<size_t>(i)]) {
        keep.push_back(i);
        ++r;
      } else {
        in_active[static_cast<size_t>(i)] = 0;
      }
    }
    active = std::move(keep);
  }

  bool kkt_solve(const std::vector<int>& active, const Vec& grad, Vec& p, Vec& lam) const {
    int k = static_cast<int>(active.size());
    Vec ginv_grad = llt_.solve(grad);
    if (k == 0) {
      p = -ginv_grad;
      lam.resize(0);
      return p.allFinite();
    }
    Mat N(n_, k);
    for (int c = 0; c < k; ++c) N.col(c) = normals_[static_cast<size_t>(active[static_cast<size_t>(c)])];
    Mat GiN = llt_.solve(N);
    Mat S = N.transpose() * GiN;
    S.diagonal().array() += 1e-12 * (1.0 + S.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<Mat> sol(S);
    lam = sol.solve(N.transpose() * ginv_grad);
    p = -ginv_grad + GiN * lam;
    return p.allFinite() && lam.allFinite();
  }
};

inline QpResult solve_qp(const QpProblem& p) {
  ActiveSetQp solver(p);
  return solver.solve();
}

/// Branch-and-bound over binaries with QP node relaxations (used where a
/// consensus step keeps its quadratic term but binaries must stay integral).
inline QpResult solve_miqp(const QpProblem& p, const std::vector<int>& binaries,
                           double int_tol = 1e-6, long node_limit = 200000) {
  struct Node {
    double bound;
    long id;
    std::vector<std::int8_t> fix;
  };
  struct Cmp {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };
  const int nb = static_cast<int>(binaries.size());
  std::priority_queue<Node, std::vector<Node>, Cmp> open;
  open.push(Node{-kInf, 0, std::vector<std::int8_t>(static_cast<size_t>(nb), -1)});
  QpResult best;
  long nodes = 0, next_id = 1;
  bool limit = false;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (best.status == SolveStatus::Optimal &&
        node.bound >= best.objective - 1e-9 * (1.0 + std::abs(best.objective)))
      continue;
    if (nodes++ >= node_limit) {
      limit = true;
      break;
    }
    QpProblem q = p;
    if (q.lower.empty()) q.lower.assign(static_cast<size_t>(q.num_vars()), -kInf);
    if (q.upper.empty()) q.upper.assign(static_cast<size_t>(q.num_vars()), kInf);
    for (int k = 0; k < nb; ++k) {
      int var = binaries[static_cast<size_t>(k)];
      if (node.fix[static_cast<size_t>(k)] < 0) {
        q.lower[static_cast<size_t>(var)] = std::max(q.lower[static_cast<size_t>(var)], 0.0);
        q.upper[static_cast<size_t>(var)] = std::min(q.upper[static_cast<size_t>(var)], 1.0);
      } else {
        q.lower[static_cast<size_t>(var)] = node.fix[static_cast<size_t>(k)];
        q.upper[static_cast<size_t>(var)] = node.fix[static_cast<size_t>(k)];
      }
    }
    QpResult rel = solve_qp(q);
    if (rel.status != SolveStatus::Optimal) continue;
    if (best.status == SolveStatus::Optimal &&
        rel.objective >= best.objective - 1e-9 * (1.0 + std::abs(best.objective)))
      continue;
    int branch = -1;
    double most = int_tol;
    for (int k = 0; k < nb; ++k) {
      double v = rel.x[binaries[static_cast<size_t>(k)]];
      double away = std::min(std::abs(v), std::abs(1.0 - v));
      if (away > most) {
        most = away;
        branch = k;
      }
    }
    if (branch < 0) {
      for (int k = 0; k < nb; ++k) {
        double& v = rel.x[binaries[static_cast<size_t>(k)]];
        v = v > 0.5 ? 1.0 : 0.0;
      }
      best = rel;
      continue;
    }
    Node lo{rel.objective, next_id++, node.fix};
    lo.fix[static_cast<size_t>(branch)] = 0;
    Node hi{rel.objective, next_id++, node.fix};
    hi.fix[static_cast<size_t>(branch)] = 1;
    open.push(std::move(lo));
    open.push(std::move(hi));
  }
  if (best.status != SolveStatus::Optimal)
    best.status = limit ? SolveStatus::IterationLimit : SolveStatus::Infeasible;
  else if (limit)
    best.status = SolveStatus::IterationLimit;
  best.iterations = nodes;
  return best;
}

}  // namespace dmilp
