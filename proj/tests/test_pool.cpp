#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dmilp/block_ops.hpp"
#include "dmilp/pool.hpp"

using namespace dmilp;

TEST_CASE("exclusion cut of a mixed pattern") {
  BinaryVec uhat{1, 1, 0, 0, 0, 0};
  LinearConstraint c = sbc_cut(uhat);
  Vec expect(6);
  expect << -1, -1, 1, 1, 1, 1;
  CHECK(c.coeffs == expect);
  CHECK(c.sense == Sense::GE);
  CHECK(c.rhs == -1.0);
}

TEST_CASE("exclusion cut of all-zeros") {
  LinearConstraint c = sbc_cut(BinaryVec{0, 0, 0});
  Vec expect(3);
  expect << 1, 1, 1;
  CHECK(c.coeffs == expect);
  CHECK(c.rhs == 1.0);
}

TEST_CASE("cut excludes exactly its pattern (exhaustive d<=6)") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int d = 1; d <= 6; ++d) {
    for (int rep = 0; rep < 4; ++rep) {
      BinaryVec uhat(static_cast<size_t>(d));
      for (auto& b : uhat) b = static_cast<std::uint8_t>(bit(rng));
      LinearConstraint c = sbc_cut(uhat);
      for (int mask = 0; mask < (1 << d); ++mask) {
        BinaryVec u(static_cast<size_t>(d));
        for (int k = 0; k < d; ++k) u[static_cast<size_t>(k)] = (mask >> k) & 1;
        bool cut_ok = c.satisfied(binary_to_vec(u));
        CHECK(cut_ok == (u != uhat));
      }
    }
  }
}

TEST_CASE("pool projection of the worked two-member example") {
  std::vector<int> sizes{3, 3};
  std::vector<BinaryVec> S{{1, 1, 0, 0, 0, 0}, {1, 1, 0, 0, 1, 1}};
  auto proj = project_pool(sizes, S);
  REQUIRE(proj.size() == 2);
  REQUIRE(proj[0].size() == 1);
  CHECK(proj[0][0] == BinaryVec{1, 1, 0});
  REQUIRE(proj[1].size() == 2);
  CHECK(proj[1][0] == BinaryVec{0, 0, 0});
  CHECK(proj[1][1] == BinaryVec{0, 1, 1});
}

TEST_CASE("empty pool projects to empty sets") {
  auto proj = project_pool({2, 3}, {});
  CHECK(proj[0].empty());
  CHECK(proj[1].empty());
}

TEST_CASE("projection product covers the pool, with equality iff full product") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> sizes{2, 2};
    int total = 4;
    std::vector<BinaryVec> S;
    std::set<std::string> keys;
    int count = 1 + t % 6;
    for (int i = 0; i < count; ++i) {
      BinaryVec u(static_cast<size_t>(total));
      for (auto& b : u) b = static_cast<std::uint8_t>(bit(rng));
      if (keys.insert(binary_to_string(u)).second) S.push_back(u);
    }
    auto proj = project_pool(sizes, S);
    size_t prod = proj[0].size() * proj[1].size();
    CHECK(prod >= S.size());
    // equality iff S is the full product of its projections
    std::set<std::string> in_product;
    for (const auto& a : proj[0])
      for (const auto& b : proj[1]) {
        BinaryVec u = a;
        u.insert(u.end(), b.begin(), b.end());
        in_product.insert(binary_to_string(u));
      }
    bool full = true;
    for (const auto& k : in_product)
      if (!keys.count(k)) full = false;
    CHECK((prod == S.size()) == full);
  }
}

TEST_CASE("binary pool maintains tuples and metadata") {
  BinaryPool pool({3, 3});
  CHECK(pool.add({1, 1, 0, 0, 0, 0}, 1));
  CHECK(pool.add({1, 1, 0, 0, 1, 1}, 2));
  CHECK_FALSE(pool.add({1, 1, 0, 0, 0, 0}, 3));  // duplicate
  REQUIRE(pool.size() == 2);
  CHECK(pool.tuples[0] == std::vector<int>{1, 1});
  CHECK(pool.tuples[1] == std::vector<int>{1, 2});
  CHECK(pool.proj[0].size() == 1);
  CHECK(pool.proj[1].size() == 2);
  pool.record_evaluation({1, 1, 0, 0, 1, 1}, true, 680.0);
  auto j = pool.to_json();
  CHECK(j[1]["feasible"] == true);
  CHECK(j[1]["z"] == 680.0);
}

TEST_CASE("auxiliary constraint system matches the worked block-2 display") {
  CoupledMilp inst = example1_instance();
  const BlockProblem& b2 = inst.blocks[1];
  AuxLayout layout;
  layout.sizes = {1, 2};
  std::vector<BinaryVec> own{{0, 0, 0}, {0, 1, 1}};
  std::vector<std::vector<int>> tuples{{1, 1}, {1, 2}};
  auto rows = build_aux_constraints(b2, 1, own, layout, tuples, /*w_offset=*/5);

  // (20): 3 rows per own member = 6; (21): 2; (22): 2; (24): 2
  REQUIRE(rows.size() == 12);
  int n_link = 0, n_nomatch = 0, n_assign = 0, n_cut = 0;
  for (const auto& r : rows) {
    bool touches_u = false;
    for (int ix : r.idx)
      if (ix < 5) touches_u = true;
    if (r.sense == Sense::EQ) {
      ++n_assign;
      CHECK(r.rhs == 1.0);
    } else if (touches_u && r.idx.size() == 2) {
      ++n_link;  // u_k >= w  or  u_k <= 1 - w
    } else if (touches_u) {
      ++n_nomatch;
    } else {
      ++n_cut;
      CHECK(r.sense == Sense::LE);
      CHECK(r.rhs == 1.0);  // N - 1 with two blocks
      CHECK(r.idx.size() == 2);
    }
  }
  CHECK(n_link == 6);
  CHECK(n_nomatch == 2);
  CHECK(n_assign == 2);
  CHECK(n_cut == 2);

  // the two pool cuts are w211+w221 <= 1 and w211+w222 <= 1 (flat: 6+8, 6+9)
  std::vector<std::vector<int>> cut_idx;
  for (const auto& r : rows)
    if (r.sense == Sense::LE && r.rhs == 1.0 && r.idx.size() == 2 && r.idx[0] >= 5)
      cut_idx.push_back(r.idx);
  REQUIRE(cut_idx.size() == 2);
  CHECK(cut_idx[0] == std::vector<int>{6, 8});
  CHECK(cut_idx[1] == std::vector<int>{6, 9});
}

TEST_CASE("selection encoding: own links satisfied iff pooled, cuts block full matches") {
  // tiny pool over a 2+2 binary instance; exhaustive over u and w
  std::vector<int> sizes{2, 2};
  std::vector<BinaryVec> S{{0, 1, 1, 0}, {0, 1, 1, 1}};
  BinaryPool pool(sizes);
  for (const auto& u : S) pool.add(u);
  AuxLayout layout;
  layout.sizes = {static_cast<int>(pool.proj[0].size()), static_cast<int>(pool.proj[1].size())};

  BlockProblem blk;
  blk.block_id = 1;
  blk.n_bin = 2;
  blk.n_cont = 0;
  blk.cost = Vec::Zero(2);
  blk.E = Mat::Zero(0, 2);
  blk.F = Mat::Zero(0, 0);
  blk.g = Vec(0);
  blk.A = Mat::Zero(0, 2);

  auto rows = build_aux_constraints(blk, 0, pool.proj[0], layout, pool.tuples, 2);
  auto rows_ref = build_aux_constraints(blk, 0, pool.proj[0], layout, pool.tuples, 2, false);

  int L = layout.length();
  for (int umask = 0; umask < 4; ++umask) {
    for (int wmask = 0; wmask < (1 << L); ++wmask) {
      Vec x(2 + L);
      x[0] = umask & 1;
      x[1] = (umask >> 1) & 1;
      for (int i = 0; i < L; ++i) x[2 + i] = (wmask >> i) & 1;
      auto ok = [&](const std::vector<LpProblem::Row>& rs) {
        for (const auto& r : rs) {
          double a = r.activity(x);
          if (r.sense == Sense::LE && a > r.rhs + 1e-9) return false;
          if (r.sense == Sense::GE && a < r.rhs - 1e-9) return false;
          if (r.sense == Sense::EQ && std::abs(a - r.rhs) > 1e-9) return false;
        }
        return true;
      };
      // strengthened and complement cut forms accept exactly the same
      // assignments under the exactly-one rows
      CHECK(ok(rows) == ok(rows_ref));
    }
  }
}
