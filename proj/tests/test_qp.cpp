#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dmilp/qp.hpp"
#include "oracles.hpp"

using namespace dmilp;

namespace {

// Enumeration oracle: every subset of constraints held as equalities gives
// a subspace minimizer; the best feasible one is the QP optimum.
std::optional<double> qp_enumeration_oracle(const QpProblem& p) {
  ActiveSetQp helper(p);  // reuse its normalized constraint list via feasibility checks
  int n = p.num_vars();
  std::vector<Vec> normals;
  std::vector<double> rhs;
  std::vector<char> eq;
  for (const auto& r : p.rows) {
    Vec c = Vec::Zero(n);
    for (size_t k = 0; k < r.idx.size(); ++k) c[r.idx[k]] = r.val[k];
    if (r.sense == Sense::LE) {
      normals.push_back(-c);
      rhs.push_back(-r.rhs);
      eq.push_back(0);
    } else {
      normals.push_back(c);
      rhs.push_back(r.rhs);
      eq.push_back(r.sense == Sense::EQ ? 1 : 0);
    }
  }
  for (int j = 0; j < n; ++j) {
    double lo = p.lower.empty() ? -kInf : p.lower[j];
    double hi = p.upper.empty() ? kInf : p.upper[j];
    Vec c = Vec::Zero(n);
    c[j] = 1.0;
    if (lo != -kInf) {
      normals.push_back(c);
      rhs.push_back(lo);
      eq.push_back(lo == hi ? 1 : 0);
    }
    if (hi != kInf && hi != lo) {
      normals.push_back(-c);
      rhs.push_back(-hi);
      eq.push_back(0);
    }
  }
  int mc = static_cast<int>(normals.size());
  auto feasible = [&](const Vec& x) {
    for (int i = 0; i < mc; ++i) {
      double s = normals[static_cast<size_t>(i)].dot(x) - rhs[static_cast<size_t>(i)];
      if (eq[static_cast<size_t>(i)] ? std::abs(s) > 1e-7 : s < -1e-7) return false;
    }
    return true;
  };
  std::optional<double> best;
  for (int mask = 0; mask < (1 << mc); ++mask) {
    std::vector<int> act;
    bool skip = false;
    for (int i = 0; i < mc; ++i) {
      bool on = (mask >> i) & 1;
      if (eq[static_cast<size_t>(i)] && !on) skip = true;
      if (on) act.push_back(i);
    }
    if (skip || static_cast<int>(act.size()) > n) continue;
    int k = static_cast<int>(act.size());
    Mat kkt(n + k, n + k);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = p.G;
    Vec b(n + k);
    b.head(n) = -p.a;
    for (int c = 0; c < k; ++c) {
      kkt.block(0, n + c, n, 1) = normals[static_cast<size_t>(act[static_cast<size_t>(c)])];
      kkt.block(n + c, 0, 1, n) =
          normals[static_cast<size_t>(act[static_cast<size_t>(c)])].transpose();
      b[n + c] = rhs[static_cast<size_t>(act[static_cast<size_t>(c)])];
    }
    Eigen::FullPivLU<Mat> lu(kkt);
    if (!lu.isInvertible()) continue;
    Vec sol = lu.solve(b);
    Vec x = sol.head(n);
    if (feasible(x)) {
      double z = 0.5 * x.dot(p.G * x) + p.a.dot(x);
      if (!best || z < *best) best = z;
    }
  }
  return best;
}

QpProblem random_qp(std::mt19937& rng, int n, int extra_rows) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  QpProblem p;
  Mat B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = d(rng);
  p.G = B.transpose() * B + Mat::Identity(n, n) * (0.3 + pos(rng));
  p.a = Vec(n);
  for (int j = 0; j < n; ++j) p.a[j] = d(rng);
  p.lower.assign(static_cast<size_t>(n), 0.0);
  p.upper.assign(static_cast<size_t>(n), 0.0);
  Vec mid(n);
  for (int j = 0; j < n; ++j) {
    double lo = -pos(rng), hi = pos(rng);
    p.lower[static_cast<size_t>(j)] = lo;
    p.upper[static_cast<size_t>(j)] = hi;
    mid[j] = 0.5 * (lo + hi);
  }
  for (int i = 0; i < extra_rows; ++i) {
    Vec c(n);
    for (int j = 0; j < n; ++j) c[j] = d(rng);
    LpProblem::Row r;
    for (int j = 0; j < n; ++j)
      if (c[j] != 0.0) {
        r.idx.push_back(j);
        r.val.push_back(c[j]);
      }
    r.sense = Sense::LE;
    r.rhs = c.dot(mid) + pos(rng);
    p.rows.push_back(std::move(r));
  }
  return p;
}

}  // namespace

TEST_CASE("box projection") {
  // min ||x - t||^2 over [0,1]^3 with t = (2, -1, 0.4) -> x = (1, 0, 0.4)
  QpProblem p;
  p.G = Mat::Identity(3, 3);
  p.a = Vec(3);
  p.a << -2, 1, -0.4;
  p.lower = {0, 0, 0};
  p.upper = {1, 1, 1};
  QpResult r = solve_qp(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == Catch::Approx(1.0));
  CHECK(r.x[1] == Catch::Approx(0.0).margin(1e-9));
  CHECK(r.x[2] == Catch::Approx(0.4));
}

TEST_CASE("projection onto a line via an equality row") {
  // min ||x||^2 s.t. x1 + x2 = 2 -> x = (1,1)
  QpProblem p;
  p.G = 2.0 * Mat::Identity(2, 2);
  p.a = Vec::Zero(2);
  LpProblem::Row r;
  r.idx = {0, 1};
  r.val = {1, 1};
  r.sense = Sense::EQ;
  r.rhs = 2;
  p.rows.push_back(r);
  QpResult res = solve_qp(p);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x[0] == Catch::Approx(1.0));
  CHECK(res.x[1] == Catch::Approx(1.0));
}

TEST_CASE("infeasible constraint set is reported") {
  QpProblem p;
  p.G = Mat::Identity(1, 1);
  p.a = Vec::Zero(1);
  p.lower = {0.0};
  p.upper = {1.0};
  LpProblem::Row r;
  r.idx = {0};
  r.val = {1};
  r.sense = Sense::GE;
  r.rhs = 2;
  p.rows.push_back(r);
  CHECK(solve_qp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("random QPs match the enumeration oracle") {
  std::mt19937 rng(42);
  int checked = 0;
  for (int t = 0; t < 80; ++t) {
    int n = 2 + t % 3;
    QpProblem p = random_qp(rng, n, 1 + t % 3);
    QpResult r = solve_qp(p);
    auto ref = qp_enumeration_oracle(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    REQUIRE(ref.has_value());
    CHECK(r.objective == Catch::Approx(*ref).margin(1e-6));
    ++checked;
  }
  REQUIRE(checked == 80);
}

TEST_CASE("warm start with changed linear term reaches the same optimum") {
  std::mt19937 rng(9);
  QpProblem p = random_qp(rng, 4, 3);
  ActiveSetQp solver(p);
  QpResult first = solver.solve();
  REQUIRE(first.status == SolveStatus::Optimal);

  Vec a2 = p.a;
  a2[0] += 1.5;
  a2[2] -= 0.5;
  solver.set_linear_term(a2);
  Vec wx = solver.last_x();
  std::vector<int> wa = solver.last_active();
  QpResult warm = solver.solve(&wx, &wa);
  REQUIRE(warm.status == SolveStatus::Optimal);

  QpProblem q = p;
  q.a = a2;
  QpResult cold = solve_qp(q);
  REQUIRE(cold.status == SolveStatus::Optimal);
  CHECK(warm.objective == Catch::Approx(cold.objective).margin(1e-7));
}

TEST_CASE("miqp branch-and-bound matches exhaustive enumeration") {
  std::mt19937 rng(7);
  for (int t = 0; t < 25; ++t) {
    int n = 3 + t % 2;
    QpProblem p = random_qp(rng, n, 2);
    // widen bounds so 0/1 values are admissible for the "binaries"
    for (int j = 0; j < 2; ++j) {
      p.lower[static_cast<size_t>(j)] = 0.0;
      p.upper[static_cast<size_t>(j)] = 1.0;
    }
    std::vector<int> bins = {0, 1};
    QpResult got = solve_miqp(p, bins);

    double best = kInf;
    for (int mask = 0; mask < 4; ++mask) {
      QpProblem q = p;
      for (int j = 0; j < 2; ++j) {
        q.lower[static_cast<size_t>(j)] = (mask >> j) & 1;
        q.upper[static_cast<size_t>(j)] = (mask >> j) & 1;
      }
      QpResult r = solve_qp(q);
      if (r.status == SolveStatus::Optimal) best = std::min(best, r.objective);
    }
    if (best == kInf) {
      CHECK(got.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(got.status == SolveStatus::Optimal);
      CHECK(got.objective == Catch::Approx(best).margin(1e-6));
    }
  }
}
