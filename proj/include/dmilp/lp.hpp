#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "dmilp/types.hpp"

namespace dmilp {

enum class SolveStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

/// LP in row form: min c.x  s.t. row_i . x (sense_i) rhs_i,  lo <= x <= hi.
/// Rows are stored sparse; variable bounds default to free.
struct LpProblem {
  struct Row {
    std::vector<int> idx;
    std::vector<double> val;
    Sense sense = Sense::LE;
    double rhs = 0.0;

    double activity(const Vec& x) const {
      double a = 0.0;
      for (size_t k = 0; k < idx.size(); ++k) a += val[k] * x[idx[k]];
      return a;
    }
  };

  Vec objective;
  std::vector<double> lower, upper;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_var(double cost, double lo = -kInf, double hi = kInf) {
    Vec c(objective.size() + 1);
    c.head(objective.size()) = objective;
    c[objective.size()] = cost;
    objective = std::move(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_vars() - 1;
  }

  void add_row(std::vector<int> idx, std::vector<double> val, Sense sense, double rhs) {
    rows.push_back(Row{std::move(idx), std::move(val), sense, rhs});
  }

  /// Dense-coefficient convenience; zero entries are dropped.
  void add_dense_row(const Vec& coeffs, Sense sense, double rhs) {
    Row r;
    r.sense = sense;
    r.rhs = rhs;
    for (int j = 0; j < coeffs.size(); ++j)
      if (coeffs[j] != 0.0) {
        r.idx.push_back(j);
        r.val.push_back(coeffs[j]);
      }
    rows.push_back(std::move(r));
  }
};

/// LP plus the indices of variables restricted to {0,1}.
struct MilpProblem {
  LpProblem lp;
  std::vector<int> binaries;
};

struct SolveStats {
  long iterations = 0;  // simplex pivots (including phase 1)
  long nodes = 0;       // branch-and-bound nodes
  long refactorizations = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;
  Vec x;      // primal values; set when Optimal, or incumbent at IterationLimit
  Vec duals;  // per-row dual values (LP solves only)
  SolveStats stats;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Writes the documented CPLEX-LP subset: objective, rows, bounds, binaries.
inline void write_cplex_lp(std::ostream& os, const MilpProblem& p, const std::string& name = "prob") {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const LpProblem& lp = p.lp;
  os << "\\ " << name << "\nMinimize\n obj:";
  for (int j = 0; j < lp.num_vars(); ++j) {
    double c = lp.objective[j];
    if (c == 0.0) continue;
    os << (c >= 0 ? " + " : " - ") << num(std::abs(c)) << " x" << j;
  }
  os << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    os << " c" << i << ":";
    for (size_t k = 0; k < r.idx.size(); ++k)
      os << (r.val[k] >= 0 ? " + " : " - ") << num(std::abs(r.val[k])) << " x" << r.idx[k];
    switch (r.sense) {
      case Sense::LE: os << " <= "; break;
      case Sense::EQ: os << " = "; break;
      case Sense::GE: os << " >= "; break;
    }
    os << num(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    double lo = lp.lower[j], hi = lp.upper[j];
    if (lo == -kInf && hi == kInf) {
      os << " x" << j << " free\n";
    } else if (lo == -kInf) {
      os << " -inf <= x" << j << " <= " << num(hi) << "\n";
    } else if (hi == kInf) {
      os << " x" << j << " >= " << num(lo) << "\n";
    } else {
      os << " " << num(lo) << " <= x" << j << " <= " << num(hi) << "\n";
    }
  }
  if (!p.binaries.empty()) {
    os << "Binaries\n";
    for (int j : p.binaries) os << " x" << j << "\n";
  }
  os << "End\n";
}

}  // namespace dmilp
