#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "apwin/partitions.hpp"

using namespace apwin;

// Brute-force oracle: q_{n+1} = min{ l : ||l w|| < ||q_n w|| } by direct scan.
static std::vector<long long> brute_return_times(const Rotation& rot, int count, long long lmax) {
  std::vector<long long> qs;
  Quad best = rot.omega();  // ||1*w|| = w since w < 1/2
  for (long long l = 1; l <= lmax && static_cast<int>(qs.size()) < count; ++l) {
    Quad nrm = orbit_norm(rot, Int(l));
    if (nrm < best) {
      best = nrm;
      qs.push_back(l);
    }
  }
  return qs;
}

TEST_CASE("return times match the brute-force oracle (sqrt2 - 1)") {
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 6);
  auto brute = brute_return_times(rot, 6, 200);
  REQUIRE(brute.size() == 6);
  for (int n = 1; n <= 6; ++n) CHECK(rt.q(n) == Int(brute[n - 1]));
  CHECK(rt.q(1) == 2);
  CHECK(rt.q(2) == 5);
  CHECK(rt.q(3) == 12);
  CHECK(rt.q(4) == 29);
  CHECK(rt.q(5) == 70);
  CHECK(rt.q(6) == 169);

  // |I_1| = 1 - 2w, i.e. the value of (1, -2)
  CHECK(rt.len(1) == rot.value(1, -2));
  // lens equal ||q_n w|| and decrease strictly
  for (int n = 1; n <= 6; ++n) {
    CHECK(rt.len(n) == orbit_norm(rot, rt.q(n)));
    if (n > 1) CHECK(rt.len(n) < rt.len(n - 1));
  }
}

TEST_CASE("return times for (3 - sqrt 5)/2 match brute force") {
  Rotation rot(5, 3, -1, 2);
  ReturnTimes rt(rot, 5);
  auto brute = brute_return_times(rot, 5, 1000);
  REQUIRE(brute.size() == 5);
  for (int n = 1; n <= 5; ++n) CHECK(rt.q(n) == Int(brute[n - 1]));
}

TEST_CASE("partition tiles the circle with two lengths") {
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 10);
  SUBCASE("n = 1 has q_2 + q_1 = 7 tiles") {
    auto tiles = partition(rt, 1);
    CHECK(tiles.size() == 7);
  }
  for (int n = 1; n <= 6; ++n) {
    auto tiles = partition(rt, n);
    CHECK(Int(tiles.size()) == rt.q(n + 1) + rt.q(n));
    // total measure exactly 1, i.e. q_{n+1} |I_n| + q_n |I_{n+1}| = 1
    Quad total(0);
    for (auto& t : tiles) total += t.length();
    CHECK(total == Quad(1));
    // exactly two tile lengths occur
    for (auto& t : tiles) {
      bool two = t.length() == rt.len(n) || t.length() == rt.len(n + 1);
      REQUIRE(two);
    }
    // sorted, interiors disjoint, consecutive tiles touch
    for (size_t i = 0; i + 1 < tiles.size(); ++i) REQUIRE(tiles[i].hi == tiles[i + 1].lo);
    // wrap closure
    REQUIRE(tiles.back().hi.frac() == tiles.front().lo);
  }
}

TEST_CASE("identity q_{n+1} |I_n| + q_n |I_{n+1}| = 1 for n <= 10") {
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 11);
  for (int n = 1; n <= 10; ++n) {
    Quad v = Quad(Rat(rt.q(n + 1))) * rt.len(n) + Quad(Rat(rt.q(n))) * rt.len(n + 1);
    REQUIRE(v == Quad(1));
  }
}

TEST_CASE("refinement tiles the parent exactly") {
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 10);
  auto tiles = partition(rt, 1);

  // refine(I_1-kind tile, 2): summed measure = parent length, pieces chain
  for (auto& J : tiles) {
    auto sub = refine(rt, J, 2);
    REQUIRE(!sub.empty());
    Quad total(0);
    for (auto& K : sub) total += K.length();
    REQUIRE(total == J.length());
    REQUIRE(sub.front().lo == J.lo);
    REQUIRE(sub.back().hi == J.hi);
    for (size_t i = 0; i + 1 < sub.size(); ++i) REQUIRE(sub[i].hi == sub[i + 1].lo);
  }

  // brute subtile-count oracle for the base interval I_1:
  // pieces of P_2 inside I_1 = cuts + 1, cuts = orbit points inside I_1
  {
    PartitionTile J = make_tile(rt, 1, false, Int(1));
    auto sub = refine(rt, J, 2);
    auto hits = orbit_hits_in(rot, J.lo, J.hi, (rt.q(2) + rt.q(3)).convert_to<long long>());
    CHECK(sub.size() == hits.size() + 1);
  }
}

TEST_CASE("refinement is translation equivariant (P_n self-similarity)") {
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 10);
  // J' = R^1(I_2), J = R^4(I_2) = R^3(J'): refine(J, 4) == R^3(refine(J', 4))
  PartitionTile J1 = make_tile(rt, 2, false, Int(1));
  PartitionTile J4 = make_tile(rt, 2, false, Int(4));
  auto s1 = refine(rt, J1, 4);
  auto s4 = refine(rt, J4, 4);
  REQUIRE(s1.size() == s4.size());
  for (size_t i = 0; i < s1.size(); ++i) {
    CHECK(s4[i].j == s1[i].j + 3);
    CHECK(s4[i].next == s1[i].next);
    CHECK(s4[i].length() == s1[i].length());
  }
}

TEST_CASE("P_{n+1} refines P_n") {
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 8);
  for (int n = 1; n <= 4; ++n) {
    auto coarse = partition(rt, n);
    auto fine = partition(rt, n + 1);
    for (auto& K : fine) {
      int inside = 0;
      for (auto& J : coarse) {
        // K inside J: compare as arcs anchored at J.lo
        Quad off = (K.lo - J.lo).frac();
        if (off + K.length() <= J.length()) ++inside;
      }
      REQUIRE(inside == 1);
    }
  }
}

TEST_CASE("orbit landing finds an index hitting a small arc") {
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 8);
  Quad lo(Rat(123456, 1000000));
  Quad hi(Rat(123466, 1000000));  // length 1e-5
  Int k = find_orbit_index_in(rt, lo, hi);
  Quad p = rot.value(0, k).frac();
  CHECK(p > lo);
  CHECK(p < hi);

  // tiny arc
  Quad lo2(Rat(777777777, 1000000000));
  Quad hi2 = lo2 + Quad(Rat(1, 100000000));
  Int k2 = find_orbit_index_in(rt, lo2, hi2);
  Quad p2 = rot.value(0, k2).frac();
  CHECK(p2 > lo2);
  CHECK(p2 < hi2);
}
