#pragma once

#include <cassert>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dmilp/model.hpp"

namespace dmilp {

struct TraceRow {
  long iteration = 0;  // outer iteration (0 during initialization phases)
  std::string phase;
  double objective = std::nan("");
  double residual_primal = std::nan("");
  double residual_dual = std::nan("");
  double lb = -kInf;
  double ub = kInf;
  long k = 0;  // global sub-iteration counter
  long cuts = 0;
  long feasible = 0;
  long messages = 0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;

  void append(TraceRow r) { rows.push_back(std::move(r)); }

  static void write_header(std::ostream& os) {
    os << "iteration,phase,objective,residual_primal,residual_dual,lb,ub,"
          "k,cuts,feasible,messages\n";
  }

  void write_csv(std::ostream& os) const {
    write_header(os);
    auto num = [&os](double v) {
      if (std::isnan(v)) {
        os << "";
      } else if (v == kInf) {
        os << "inf";
      } else if (v == -kInf) {
        os << "-inf";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        os << buf;
      }
    };
    for (const auto& r : rows) {
      os << r.iteration << ',' << r.phase << ',';
      num(r.objective);
      os << ',';
      num(r.residual_primal);
      os << ',';
      num(r.residual_dual);
      os << ',';
      num(r.lb);
      os << ',';
      num(r.ub);
      os << ',' << r.k << ',' << r.cuts << ',' << r.feasible << ',' << r.messages << '\n';
    }
  }
};

/// Monotone bound pair with the incumbent binaries. update_* enforce the
/// direction; a crossing pair (lb > ub beyond tolerance) is a bug in the
/// caller, asserted in debug builds.
struct BoundsTracker {
  double lb = -kInf;
  double ub = kInf;
  std::optional<BinaryVec> incumbent;  // stacked global binaries
  MixedSolution best_solution;
  ConvergenceTrace history;

  bool update_lb(double cand) {
    if (!(cand > lb)) return false;
    lb = cand;
    assert(lb <= ub + 1e-6 * (1.0 + std::abs(ub)));
    return true;
  }

  bool update_ub(double cand, BinaryVec u, MixedSolution sol) {
    if (!(cand < ub)) return false;
    ub = cand;
    incumbent = std::move(u);
    best_solution = std::move(sol);
    assert(lb <= ub + 1e-6 * (1.0 + std::abs(ub)));
    return true;
  }

  bool gap_closed(double tol = 1e-6) const {
    return ub != kInf && lb != -kInf && ub - lb <= tol * (1.0 + std::abs(ub));
  }
};

}  // namespace dmilp
