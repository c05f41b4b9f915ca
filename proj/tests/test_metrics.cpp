#include "gta/error.hpp"
#include "gta/metrics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

using namespace gta;
using testing::Rng;

namespace {

// Plain recursion over (i, j) with memoization: DTW(i, j) = d(i, j) + min of the three predecessors.
double dtw_oracle(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  std::map<std::pair<int, int>, double> memo;
  std::function<double(int, int)> rec = [&](int i, int j) -> double {
    const double d = (a[i] - b[j]).norm();
    if (i == 0 && j == 0) return d;
    if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
    double best = INFINITY;
    if (i > 0) best = std::min(best, rec(i - 1, j));
    if (j > 0) best = std::min(best, rec(i, j - 1));
    if (i > 0 && j > 0) best = std::min(best, rec(i - 1, j - 1));
    return memo[{i, j}] = d + best;
  };
  return rec(static_cast<int>(a.size()) - 1, static_cast<int>(b.size()) - 1);
}

std::vector<Vec2> random_path(Rng& rng, int max_points) {
  std::vector<Vec2> p(static_cast<std::size_t>(rng.integer(1, max_points)));
  for (auto& q : p) q = Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5));
  return p;
}

}  // namespace

TEST_CASE("navigation error and inclusive success") {
  CHECK(navigation_error(Vec2(1, 2), Vec2(1, 2)) == 0.0);
  CHECK(success(Vec2(1, 2), Vec2(1, 2), 3.0));
  CHECK(success(Vec2(3, 0), Vec2(0, 0), 3.0));
  CHECK_FALSE(success(Vec2(3.01, 0), Vec2(0, 0), 3.0));
  CHECK(navigation_error(Vec2(3, 4), Vec2(0, 0)) == 5.0);
}

TEST_CASE("oracle success") {
  const std::vector<Vec2> pass_by{{-5, 1}, {0, 1}, {5, 1}, {10, 1}};
  CHECK(oracle_success(pass_by, Vec2(0, 0), 3.0));
  CHECK_FALSE(success(pass_by.back(), Vec2(0, 0), 3.0));
  CHECK_FALSE(oracle_success({{10, 10}, {10, 11}}, Vec2(0, 0), 3.0));
}

TEST_CASE("spl") {
  CHECK(spl(true, 4.0, 4.0) == 1.0);
  CHECK(spl(true, 4.0, 8.0) == 0.5);
  CHECK(spl(true, 4.0, 2.0) == 1.0);
  CHECK(spl(false, 4.0, 4.0) == 0.0);
  CHECK_THROWS_AS(spl(true, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(spl(false, -1.0, 1.0), ValidationError);
}

TEST_CASE("path length") {
  CHECK(path_length({}) == 0.0);
  CHECK(path_length({{1, 1}}) == 0.0);
  CHECK(path_length({{0, 0}, {3, 4}, {3, 0}}) == 9.0);
}

TEST_CASE("ndtw closed forms") {
  const std::vector<Vec2> ref{{0, 0}, {1, 0}, {2, 0}};
  CHECK(ndtw(ref, ref, 3.0) == 1.0);
  CHECK(ndtw({{0, 0}}, {{0, 2}}, 3.0) == doctest::Approx(std::exp(-2.0 / 3.0)).epsilon(1e-15));
  // Shifting every point by 1 m sideways costs 1 per reference point.
  CHECK(ndtw({{0, 1}, {1, 1}, {2, 1}}, ref, 3.0) == doctest::Approx(std::exp(-3.0 / 9.0)).epsilon(1e-15));
}

TEST_CASE("dtw matches the recursive oracle on random paths") {
  Rng rng(91);
  for (int n = 0; n < 200; ++n) {
    const auto a = random_path(rng, 20), b = random_path(rng, 20);
    const double r = rng.uniform(0.5, 5.0);
    CHECK(std::abs(dtw(a, b) - dtw_oracle(a, b)) <= 1e-9);
    CHECK(std::abs(ndtw(a, b, r) - std::exp(-dtw_oracle(a, b) / (b.size() * r))) <= 1e-9);
  }
}

TEST_CASE("ndtw bounds and translation invariance") {
  Rng rng(92);
  for (int n = 0; n < 200; ++n) {
    const auto a = random_path(rng, 20), b = random_path(rng, 20);
    const double v = ndtw(a, b, 3.0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(ndtw(a, a, 3.0) == 1.0);
    const Vec2 shift(rng.uniform(-100, 100), rng.uniform(-100, 100));
    auto as = a, bs = b;
    for (auto& p : as) p += shift;
    for (auto& p : bs) p += shift;
    CHECK(std::abs(ndtw(as, bs, 3.0) - v) <= 1e-9);
  }
}

TEST_CASE("resampling") {
  const auto r = resample_path({{0, 0}, {1.2, 0}}, 0.5);
  REQUIRE(r.size() == 4);
  CHECK(r[1].x() == doctest::Approx(0.5));
  CHECK(r[2].x() == doctest::Approx(1.0));
  CHECK(r[3].x() == 1.2);
  CHECK(resample_path({{2, 2}}, 0.5).size() == 1);
  // Duplicate points do not produce duplicates.
  CHECK(resample_path({{0, 0}, {0, 0}, {1, 0}}, 0.5).size() == 3);
  // Spacing along a corner.
  const auto c = resample_path({{0, 0}, {1, 0}, {1, 1}}, 0.5);
  CHECK(c.size() == 5);
  CHECK((c[3] - Vec2(1, 0.5)).norm() < 1e-12);
}

TEST_CASE("score_trajectory on a straight 2 m run") {
  const std::vector<Vec2> traj{{0, 0}, {0.5, 0}, {1, 0}, {1.5, 0}, {2, 0}};
  const auto m = score_trajectory(traj, Vec2(2, 0), 3.0, 2.0, {{0, 0}, {2, 0}});
  CHECK(m.success);
  CHECK(m.oracle_success);
  CHECK(m.ne == 0.0);
  CHECK(m.tl == 2.0);
  CHECK(m.spl == 1.0);
  CHECK(m.ndtw == 1.0);
}

// Ten hand-built logs with the values worked out by hand.
TEST_CASE("constructed logs") {
  struct Case {
    std::vector<Vec2> traj;
    Vec2 goal;
    double shortest;
    bool sr, osr;
    double ne, tl, spl;
  };
  const std::vector<Case> cases{
      {{{0, 0}, {2, 0}}, {2, 0}, 2.0, true, true, 0.0, 2.0, 1.0},
      {{{0, 0}, {4, 0}}, {2, 0}, 2.0, true, true, 2.0, 4.0, 0.5},
      {{{0, 0}, {5, 0}}, {2, 0}, 2.0, true, true, 3.0, 5.0, 0.4},       // exactly on the radius
      {{{0, 0}, {5.01, 0}}, {2, 0}, 2.0, false, true, 3.01, 5.01, 0.0},
      {{{0, 0}, {0, 10}}, {10, 0}, 10.0, false, false, std::sqrt(200.0), 10.0, 0.0},
      {{{0, 0}, {3, 0}, {3, 4}}, {3, 4}, 5.0, true, true, 0.0, 7.0, 5.0 / 7.0},
      {{{0, 0}, {10, 0}, {0, 0}}, {10, 0}, 10.0, false, true, 10.0, 20.0, 0.0},
      {{{1, 1}}, {1, 1}, 1.0, true, true, 0.0, 0.0, 1.0},
      {{{0, 0}, {0, 3}}, {4, 3}, 5.0, false, false, 4.0, 3.0, 0.0},
      {{{0, 0}, {6, 8}}, {6, 8}, 6.0, true, true, 0.0, 10.0, 0.6},
  };
  for (const auto& c : cases) {
    const auto m = score_trajectory(c.traj, c.goal, 3.0, c.shortest, {c.traj.front(), c.goal});
    CHECK(m.success == c.sr);
    CHECK(m.oracle_success == c.osr);
    CHECK(m.ne == doctest::Approx(c.ne).epsilon(1e-12));
    CHECK(m.tl == doctest::Approx(c.tl).epsilon(1e-12));
    CHECK(m.spl == doctest::Approx(c.spl).epsilon(1e-12));
    CHECK((m.oracle_success || !m.success));
    CHECK((m.spl == 0.0 || m.success));
    CHECK(m.ndtw >= 0.0);
    CHECK(m.ndtw <= 1.0);
  }
}
