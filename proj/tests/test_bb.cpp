#include <catch2/catch_amalgamated.hpp>

#include "dmilp/bb.hpp"
#include "oracles.hpp"

using namespace dmilp;

TEST_CASE("brute force finds the example1 optimum over 49 candidates") {
  CoupledMilp inst = example1_instance();
  BruteForceResult bf = brute_force_milp(inst);
  REQUIRE(bf.status == SolveStatus::Optimal);
  CHECK(bf.candidates == 49);
  // Established by this oracle and frozen: u = (1,1,0 | 0,1,1),
  // y = (90,100 | 0,20), objective 680.
  CHECK(bf.objective == Catch::Approx(680.0).margin(1e-6));
  CHECK(bf.ustar[0] == BinaryVec{1, 1, 0});
  CHECK(bf.ustar[1] == BinaryVec{0, 1, 1});
  CHECK(evaluate_objective(inst, bf.solution) == Catch::Approx(680.0).margin(1e-6));
  CHECK(coupling_residual(inst, bf.solution).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("central branch-and-bound agrees with brute force on example1") {
  CoupledMilp inst = example1_instance();
  MilpProblem central = assemble_central(inst);
  SolveResult r = solve_milp(central);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(680.0).margin(1e-6));
}

TEST_CASE("LP-integral instance solves at the root node") {
  // min -u over u in {0,1}: relaxation is already integral at u = 1.
  MilpProblem p;
  p.lp.objective = Vec(1);
  p.lp.objective << -1;
  p.lp.lower = {0.0};
  p.lp.upper = {1.0};
  p.binaries = {0};
  SolveResult r = solve_milp(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(-1.0));
  CHECK(r.stats.nodes == 1);
}

TEST_CASE("single binary picks the cheap branch") {
  CoupledMilp inst;
  BlockProblem b;
  b.block_id = 1;
  b.n_bin = 1;
  b.n_cont = 1;
  b.cost = Vec(2);
  b.cost << 1, 0;
  b.E = Mat::Zero(2, 1);
  b.F = Mat::Zero(2, 1);
  b.g = Vec::Zero(2);
  b.F(0, 0) = -1;            // y >= 0
  b.E(1, 0) = -1;            // y <= u
  b.F(1, 0) = 1;
  b.A = Mat::Zero(0, 2);
  inst.blocks.push_back(b);
  inst.rhs = Vec(0);
  BruteForceResult bf = brute_force_milp(inst);
  REQUIRE(bf.status == SolveStatus::Optimal);
  CHECK(bf.objective == Catch::Approx(0.0));
  CHECK(bf.ustar[0] == BinaryVec{0});
}

TEST_CASE("contradictory binary constraints give an empty enumeration") {
  CoupledMilp inst;
  BlockProblem b;
  b.block_id = 1;
  b.n_bin = 1;
  b.n_cont = 0;
  b.cost = Vec::Zero(1);
  LinearConstraint c1, c2;
  c1.coeffs = Vec::Ones(1);
  c1.sense = Sense::GE;
  c1.rhs = 1.0;
  c2.coeffs = Vec::Ones(1);
  c2.sense = Sense::LE;
  c2.rhs = 0.0;
  b.bin_constraints = {c1, c2};
  b.E = Mat::Zero(0, 1);
  b.F = Mat::Zero(0, 0);
  b.g = Vec(0);
  b.A = Mat::Zero(0, 1);
  inst.blocks.push_back(b);
  inst.rhs = Vec(0);
  BruteForceResult bf = brute_force_milp(inst);
  CHECK(bf.status == SolveStatus::Infeasible);
  CHECK(bf.candidates == 0);
}

TEST_CASE("node limit returns iteration-limit status") {
  CoupledMilp inst = example1_instance();
  MilpProblem central = assemble_central(inst);
  SolveResult r = solve_milp(central, 1e-6, /*node_limit=*/1);
  CHECK(r.status == SolveStatus::IterationLimit);
}

TEST_CASE("property: branch-and-bound equals brute force on random instances") {
  std::mt19937 rng(2024);
  int solved = 0;
  for (int t = 0; t < 100; ++t) {
    CoupledMilp inst = testing::random_coupled_instance(rng);
    REQUIRE(validate_instance(inst).ok());
    BruteForceResult bf = brute_force_milp(inst);
    MilpProblem central = assemble_central(inst);
    SolveResult r = solve_milp(central);
    if (bf.status == SolveStatus::Optimal) {
      REQUIRE(r.status == SolveStatus::Optimal);
      CHECK(r.objective == Catch::Approx(bf.objective).margin(1e-6));
      ++solved;
    } else {
      CHECK(r.status == SolveStatus::Infeasible);
    }
  }
  REQUIRE(solved >= 90);  // the generator makes feasible instances by construction
}
