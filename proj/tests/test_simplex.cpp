#include <catch2/catch_amalgamated.hpp>

#include "dmilp/model.hpp"
#include "dmilp/simplex.hpp"
#include "oracles.hpp"

using namespace dmilp;

TEST_CASE("one-variable LP with a binding lower-bound row") {
  // min x  s.t. x >= 3
  LpProblem p;
  p.objective = Vec::Ones(1);
  p.lower = {-kInf};
  p.upper = {kInf};
  p.add_row({0}, {1.0}, Sense::GE, 3.0);
  SolveResult r = solve_lp(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(3.0));
  CHECK(r.x[0] == Catch::Approx(3.0));
  REQUIRE(r.duals.size() == 1);
  CHECK(r.duals[0] == Catch::Approx(1.0));
}

TEST_CASE("infeasible and unbounded statuses are returns") {
  SECTION("infeasible") {
    LpProblem p;
    p.objective = Vec::Ones(1);
    p.lower = {0.0};
    p.upper = {1.0};
    p.add_row({0}, {1.0}, Sense::GE, 2.0);
    CHECK(solve_lp(p).status == SolveStatus::Infeasible);
  }
  SECTION("unbounded") {
    LpProblem p;
    p.objective = Vec::Ones(1) * -1.0;
    p.lower = {0.0};
    p.upper = {kInf};
    CHECK(solve_lp(p).status == SolveStatus::Unbounded);
  }
  SECTION("equality rows feed phase 1") {
    LpProblem p;
    p.objective = Vec::Zero(2);
    p.objective << 1, 1;
    p.lower = {0.0, 0.0};
    p.upper = {kInf, kInf};
    p.add_row({0, 1}, {1.0, 1.0}, Sense::EQ, 4.0);
    p.add_row({0, 1}, {1.0, -1.0}, Sense::EQ, 2.0);
    SolveResult r = solve_lp(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.x[0] == Catch::Approx(3.0));
    CHECK(r.x[1] == Catch::Approx(1.0));
  }
}

TEST_CASE("strong duality and complementary slackness at optimum") {
  std::mt19937 rng(11);
  for (int t = 0; t < 60; ++t) {
    LpProblem p = testing::random_bounded_lp(rng, 2 + t % 4, 1 + t % 3);
    SolveResult r = solve_lp(p);
    if (r.status != SolveStatus::Optimal) continue;
    // primal feasibility
    for (int j = 0; j < p.num_vars(); ++j) {
      CHECK(r.x[j] >= p.lower[j] - 1e-6);
      CHECK(r.x[j] <= p.upper[j] + 1e-6);
    }
    for (const auto& row : p.rows) {
      double act = row.activity(r.x);
      if (row.sense == Sense::LE) CHECK(act <= row.rhs + 1e-6);
      if (row.sense == Sense::GE) CHECK(act >= row.rhs - 1e-6);
      if (row.sense == Sense::EQ) CHECK(act == Catch::Approx(row.rhs).margin(1e-6));
      // complementary slackness: slack rows carry zero dual
      double y = r.duals[static_cast<long>(&row - p.rows.data())];
      if (row.sense != Sense::EQ && std::abs(act - row.rhs) > 1e-5)
        CHECK(std::abs(y) < 1e-6);
    }
  }
}

TEST_CASE("simplex agrees with vertex enumeration on random bounded LPs") {
  std::mt19937 rng(23);
  int compared = 0;
  for (int t = 0; t < 120; ++t) {
    LpProblem p = testing::random_bounded_lp(rng, 2 + t % 3, 1 + t % 3);
    SolveResult r = solve_lp(p);
    auto ref = testing::vertex_enumeration_lp(p);
    if (r.status == SolveStatus::Optimal) {
      REQUIRE(ref.has_value());
      CHECK(r.objective == Catch::Approx(ref->objective).margin(1e-6));
      ++compared;
    } else if (r.status == SolveStatus::Infeasible) {
      CHECK_FALSE(ref.has_value());
    }
  }
  REQUIRE(compared > 40);
}

TEST_CASE("determinism: same input, same pivot count") {
  std::mt19937 rng(5);
  LpProblem p = testing::random_bounded_lp(rng, 6, 5);
  SolveResult a = solve_lp(p);
  SolveResult b = solve_lp(p);
  REQUIRE(a.status == b.status);
  CHECK(a.stats.iterations == b.stats.iterations);
  if (a.status == SolveStatus::Optimal) {
    CHECK(a.objective == b.objective);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("warm restarts: objective change, bound change, added row") {
  // max-flow-ish toy: min -x1 - x2 over a pentagon
  LpProblem p;
  p.objective = Vec(2);
  p.objective << -1, -1;
  p.lower = {0.0, 0.0};
  p.upper = {4.0, 4.0};
  p.add_row({0, 1}, {1.0, 1.0}, Sense::LE, 6.0);
  SimplexSolver s(p);
  SolveResult r = s.solve();
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(-6.0));

  SECTION("objective swap re-solves primally") {
    Vec c2(2);
    c2 << 1, -2;
    s.set_objective(c2);
    SolveResult r2 = s.solve();
    REQUIRE(r2.status == SolveStatus::Optimal);
    CHECK(r2.objective == Catch::Approx(-8.0));  // x = (0,4)
  }

  SECTION("bound tightening re-solves dually") {
    s.set_bounds(0, 0.0, 1.0);
    SolveResult r2 = s.solve();
    REQUIRE(r2.status == SolveStatus::Optimal);
    CHECK(r2.objective == Catch::Approx(-5.0));  // x = (1,4)
  }

  SECTION("added cut re-solves dually") {
    LpProblem::Row cut;
    cut.idx = {0, 1};
    cut.val = {1.0, 2.0};
    cut.sense = Sense::LE;
    cut.rhs = 5.0;
    s.add_row(cut);
    SolveResult r2 = s.solve();
    REQUIRE(r2.status == SolveStatus::Optimal);
    // optimum of min -x1-x2 with x1+x2<=6, x1+2x2<=5, box [0,4]^2 -> x=(4,0.5)
    CHECK(r2.objective == Catch::Approx(-4.5));
  }
}

TEST_CASE("warm restart matches cold solve on random perturbations") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int t = 0; t < 30; ++t) {
    LpProblem p = testing::random_bounded_lp(rng, 5, 4);
    SimplexSolver warm(p);
    SolveResult base = warm.solve();
    if (base.status != SolveStatus::Optimal) continue;

    // new objective
    Vec c(p.num_vars());
    for (int j = 0; j < p.num_vars(); ++j) c[j] = d(rng);
    warm.set_objective(c);
    SolveResult w1 = warm.solve();
    LpProblem q = p;
    q.objective = c;
    SolveResult cold = solve_lp(q);
    REQUIRE(w1.status == cold.status);
    if (cold.status == SolveStatus::Optimal)
      CHECK(w1.objective == Catch::Approx(cold.objective).margin(1e-6));

    // tighten one variable's upper bound
    int var = t % p.num_vars();
    double mid = (p.lower[var] + p.upper[var]) / 2;
    warm.set_bounds(var, p.lower[var], mid);
    q.upper[var] = mid;
    SolveResult w2 = warm.solve();
    SolveResult cold2 = solve_lp(q);
    REQUIRE(w2.status == cold2.status);
    if (cold2.status == SolveStatus::Optimal)
      CHECK(w2.objective == Catch::Approx(cold2.objective).margin(1e-6));
  }
}

TEST_CASE("weak duality holds at the optimum of random LPs") {
  std::mt19937 rng(131);
  for (int t = 0; t < 40; ++t) {
    LpProblem p = testing::random_bounded_lp(rng, 4, 3);
    SimplexSolver s(p);
    SolveResult r = s.solve();
    if (r.status != SolveStatus::Optimal) continue;
    double g = s.dual_objective();
    CHECK(g <= r.objective + 1e-6);
    CHECK(g == Catch::Approx(r.objective).margin(1e-5));
  }
}

TEST_CASE("cplex-lp export covers the documented subset") {
  CoupledMilp inst = example1_instance();
  MilpProblem central = assemble_central(inst);
  std::ostringstream os;
  write_cplex_lp(os, central, "example1");
  std::string text = os.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
