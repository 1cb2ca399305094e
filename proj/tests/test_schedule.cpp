#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "vilt/schedule.hpp"

using namespace vilt;

namespace {

std::vector<std::vector<std::size_t>> record(Schedule& s, std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.next());
  return out;
}

}  // namespace

TEST_CASE("cyclic visits indices in order") {
  auto s = Schedule::cyclic(3);
  CHECK(s.window() == 3);
  const auto h = record(s, 7);
  const std::vector<std::size_t> expect = {0, 1, 2, 0, 1, 2, 0};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(h[i].size() == 1);
    CHECK(h[i][0] == expect[i]);
  }
  CHECK(!verify_coverage(3, 3, h).has_value());
}

TEST_CASE("shuffled cyclic covers every window of 2U-1") {
  for (std::uint64_t seed : {1ULL, 2ULL, 42ULL, 999ULL}) {
    auto s = Schedule::shuffled_cyclic(5, seed);
    CHECK(s.window() == 9);
    const auto h = record(s, 200);
    CHECK(!verify_coverage(5, 9, h).has_value());
    // each epoch is a permutation
    for (std::size_t e = 0; e < 200 / 5; ++e) {
      std::vector<bool> seen(5, false);
      for (std::size_t i = 0; i < 5; ++i) seen[h[e * 5 + i][0]] = true;
      CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    }
  }
}

TEST_CASE("worst-case permutation pair still covers within 2U-1") {
  // exhaustive over all pairs of epoch permutations for U=3
  std::vector<std::size_t> p1 = {0, 1, 2};
  do {
    std::vector<std::size_t> p2 = {0, 1, 2};
    do {
      std::vector<std::vector<std::size_t>> h;
      for (std::size_t v : p1) h.push_back({v});
      for (std::size_t v : p2) h.push_back({v});
      CHECK(!verify_coverage(3, 5, h).has_value());
    } while (std::next_permutation(p2.begin(), p2.end()));
  } while (std::next_permutation(p1.begin(), p1.end()));
}

TEST_CASE("explicit schedule: valid round robin") {
  auto s = Schedule::explicit_sets(4, {{0, 1}, {2, 3}}, 2);
  const auto h = record(s, 6);
  CHECK(h[0] == std::vector<std::size_t>{0, 1});
  CHECK(h[1] == std::vector<std::size_t>{2, 3});
  CHECK(h[2] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("explicit schedule omitting an index is rejected at window 0") {
  CHECK_THROWS_WITH_AS(
      Schedule::explicit_sets(2, {{0}, {0}, {0}}, 3),
      "schedule: window starting at iteration 0 does not select every index",
      std::invalid_argument);
}

TEST_CASE("explicit schedule with a late gap names the violating window") {
  // {0},{1},{0},{0},{0}: the window of 2 starting at 2 misses index 1
  CHECK_THROWS_WITH_AS(
      Schedule::explicit_sets(2, {{0}, {1}, {0}, {0}, {0}}, 2),
      "schedule: window starting at iteration 2 does not select every index",
      std::invalid_argument);
}

TEST_CASE("explicit schedule validation") {
  CHECK_THROWS_AS(Schedule::explicit_sets(2, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::explicit_sets(2, {{}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::explicit_sets(2, {{5}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::explicit_sets(0, {{0}}, 1), std::invalid_argument);
}

TEST_CASE("full schedule selects the whole universe each iteration") {
  auto s = Schedule::full(4);
  CHECK(s.window() == 1);
  const auto& set = s.next();
  CHECK(set == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("verify_coverage finds the first violating window") {
  const std::vector<std::vector<std::size_t>> h = {{0}, {1}, {0}, {0}, {0}, {1}};
  CHECK(!verify_coverage(2, 2, {{0}, {1}, {0}, {1}}).has_value());
  const auto violation = verify_coverage(2, 2, h);
  REQUIRE(violation.has_value());
  CHECK(*violation == 2);  // {0},{0} starting at index 2
  // a history shorter than the window cannot be judged
  CHECK(!verify_coverage(2, 10, h).has_value());
}
