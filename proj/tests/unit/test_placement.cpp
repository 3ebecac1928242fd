// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "risplace/error.hpp"
#include "risplace/placement.hpp"
#include "risplace/rng.hpp"

using namespace risplace;

namespace {

constexpr double kPi = std::numbers::pi;

// Small open cell with the BS on its western edge; cheap enough for the solver.
Scenario small_scenario() {
  Scenario sc;
  sc.name = "small";
  sc.bs = {-20, 0};
  sc.cell = {{0, 0}, 20};
  sc.users = HomogeneousUsers{0.005, sc.cell};
  sc.rf.bs_antennas = 4;
  sc.rf.ris_elements = 8;
  sc.placement.candidates = 8;
  sc.placement.instantiations = 4;
  sc.solver.max_iters = 100;
  return sc;
}

// Quadrant 1..4 of p around c, counterclockwise from the +x axis.
int quadrant_of(Point2 p, Point2 c) {
  double a = std::atan2(p.y - c.y, p.x - c.x);
  if (a < 0) a += 2 * kPi;
  return std::min(4, 1 + static_cast<int>(a / (kPi / 2)));
}

int expected_levels(double d_start, double d_p) {
  if (d_start <= d_p) return 1;
  return static_cast<int>(std::ceil(std::log2(d_start / d_p) - 1e-12)) + 1;
}

// Gaussian cloud around `mode`, clipped to `circle`.
SolutionSet synthetic_set(Point2 mode, double sigma, const Cell& circle, int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd(0.0, sigma);
  SolutionSet s;
  s.circle = circle;
  while (static_cast<int>(s.solutions.size()) < n) {
    const Point2 p{mode.x + nd(eng), mode.y + nd(eng)};
    if (distance(p, circle.center) > circle.radius) continue;
    Solution sol;
    sol.location = p;
    sol.instantiation = static_cast<int>(s.solutions.size());
    s.solutions.push_back(sol);
  }
  return s;
}

}  // namespace

TEST_CASE("sample_users") {
  const Cell cell{{0, 0}, 20};
  SUBCASE("zero density") {
    const UserModel m = HomogeneousUsers{0.0, cell};
    CHECK(sample_users(m, cell, {}, 1).empty());
    CHECK(expected_users(m) == 0.0);
  }
  SUBCASE("mean count follows the Poisson law") {
    const UserModel m = HomogeneousUsers{0.009, cell};
    CHECK(expected_users(m) == doctest::Approx(11.3097).epsilon(1e-5));
    double total = 0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) total += static_cast<double>(sample_users(m, cell, {}, i).size());
    CHECK(std::abs(total / draws - 11.3097) < 0.03 * 11.3097);
  }
  SUBCASE("users avoid obstacles and stay in the cell") {
    const std::vector<Obstacle> obs{make_circle({5, 5}, 4), make_wall({-5, 0}, 10, 0.3)};
    const UserModel m = HotspotUsers{{{{{5, 5}, 6}, 0.2}, {{{-10, -10}, 5}, 0.05}}};
    for (std::uint64_t s = 0; s < 50; ++s)
      for (const Point2& p : sample_users(m, cell, obs, s)) {
        CHECK(cell.contains(p));
        CHECK_FALSE(point_in_obstacle(p, obs));
      }
  }
  SUBCASE("region buried in an obstacle") {
    const std::vector<Obstacle> obs{make_circle({5, 5}, 4)};
    const UserModel m = HotspotUsers{{{{{5, 5}, 3.99}, 1.0}}};
    CHECK_THROWS_AS(sample_users(m, cell, obs, 3), Error);
  }
  SUBCASE("fixed seed reproduces the draw") {
    const UserModel m = HomogeneousUsers{0.02, cell};
    CHECK(sample_users(m, cell, {}, 77) == sample_users(m, cell, {}, 77));
  }
}

TEST_CASE("candidate sets") {
  const Cell cell{{0, 0}, 20};
  SUBCASE("quadrants cycle evenly in an open circle") {
    const int m = 7;
    const auto set = build_candidate_set({-20, 0}, {}, cell, cell, 4 * m, 0.0, 5);
    REQUIRE(set.points.size() == 4u * m);
    int per[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < set.points.size(); ++i) {
      const int expect = static_cast<int>((i + 1) % 4 == 0 ? 4 : (i + 1) % 4);
      CHECK(set.quadrant[i] == expect);
      CHECK(quadrant_of(set.points[i], cell.center) == expect);
      ++per[expect];
    }
    for (int q = 1; q <= 4; ++q) CHECK(per[q] == m);
    CHECK(set.skipped_quadrants.empty());
  }
  SUBCASE("BS walled off from the whole cell") {
    const std::vector<Obstacle> wall{make_wall({-21, 0}, 100, kPi / 2)};
    CHECK_THROWS_AS(build_candidate_set({-25, 0}, wall, cell, cell, 4, 0.0, 5), Error);
    try {
      build_candidate_set({-25, 0}, wall, cell, cell, 4, 0.0, 5);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleQuadrant);
    }
  }
  SUBCASE("far-field distance is respected") {
    const auto set = build_candidate_set({-20, 0}, {}, cell, cell, 40, 14.0625, 9);
    double closest = 1e9;
    for (const Point2& p : set.points) closest = std::min(closest, distance(p, {-20, 0}));
    CHECK(closest >= 14.0625);
  }
  SUBCASE("blocked quadrants hand their share to the next open one") {
    // A wall along x = 0 hides the eastern half of the cell from the BS.
    const std::vector<Obstacle> wall{make_wall({0, 0}, 60, kPi / 2)};
    const auto set = build_candidate_set({-20, 0}, wall, cell, cell, 8, 0.0, 2);
    CHECK(set.points.size() == 8u);
    CHECK(set.skipped_quadrants.size() == 2u);
    for (const Point2& p : set.points) CHECK(p.x < 0.0);
  }
  SUBCASE("invariants on an obstructed scene") {
    const std::vector<Obstacle> obs{make_circle({-5, 3}, 3), make_wall({5, -5}, 8, 1.1), make_circle({8, 8}, 2)};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Cell circle{{2, 2}, 10};
      const auto set = build_candidate_set({-20, 0}, obs, cell, circle, 12, 5.0, seed);
      CHECK(set.points.size() == 12u);
      for (const Point2& p : set.points) {
        CHECK(feasible_site(p, {-20, 0}, obs, cell, 5.0));
        CHECK(distance(p, circle.center) <= circle.radius + 1e-12);
      }
    }
  }
}

TEST_CASE("evaluate_candidate") {
  Scenario sc = small_scenario();
  SUBCASE("no users") {
    const auto score = evaluate_candidate(sc, Point2{0, 10}, {}, {1, 2});
    CHECK(score.min_sinr == std::numeric_limits<double>::infinity());
  }
  SUBCASE("users cut off from both the BS and the RIS") {
    sc.obstacles = {make_wall({5, 0}, 39.9, kPi / 2)};
    const std::vector<Point2> users{{12, 0}, {14, 3}};
    CHECK(evaluate_candidate(sc, Point2{-5, 10}, users, {1, 2}).min_sinr == 0.0);
  }
  SUBCASE("RIS restores a shadowed user") {
    sc.obstacles = {make_wall({5, 0}, 20, kPi / 2)};
    const std::vector<Point2> users{{12, 0}};
    CHECK(evaluate_candidate(sc, std::nullopt, users, {1, 2}).min_sinr == 0.0);
    CHECK(evaluate_candidate(sc, Point2{8, 15}, users, {1, 2}).min_sinr > 0.0);
  }
}

TEST_CASE("solution sets") {
  Scenario sc = small_scenario();
  SUBCASE("singleton candidate set") {
    const auto s = build_solution_set(sc, sc.cell, 1, 1, 42);
    REQUIRE(s.solutions.size() == 1u);
    CHECK(s.solutions[0].location == s.candidate_sets[0].points[0]);
  }
  SUBCASE("deterministic and schedule independent") {
    const auto a = build_solution_set(sc, sc.cell, 4, 6, 7, 1);
    const auto b = build_solution_set(sc, sc.cell, 4, 6, 7, 3);
    REQUIRE(a.solutions.size() == b.solutions.size());
    for (std::size_t i = 0; i < a.solutions.size(); ++i) {
      CHECK(a.solutions[i].location == b.solutions[i].location);
      CHECK(a.solutions[i].min_sinr == b.solutions[i].min_sinr);
      CHECK(a.solutions[i].wsr == b.solutions[i].wsr);
    }
  }
  SUBCASE("every solution is one of its own candidates") {
    const auto s = build_solution_set(sc, sc.cell, 4, 6, 8);
    for (std::size_t i = 0; i < s.solutions.size(); ++i) {
      const auto& sol = s.solutions[i];
      const auto& cand = s.candidate_sets[i].points;
      CHECK(std::find(cand.begin(), cand.end(), sol.location) != cand.end());
      CHECK(cand[sol.candidate] == sol.location);
      CHECK(sol.users > 0);
    }
  }
  SUBCASE("solutions cluster where the RIS sees a shadowed hotspot") {
    sc.obstacles = {make_wall({5, 0}, 20, kPi / 2)};
    const Point2 spot{12, 0};
    sc.users = HotspotUsers{{{{spot, 3}, 0.1}}};
    sc.placement.candidates = 16;
    const auto s = build_solution_set(sc, sc.cell, 10, 16, 21);
    int visible = 0;
    for (const auto& sol : s.solutions) visible += !segment_blocked(sol.location, spot, sc.obstacles);
    CHECK(visible >= 0.8 * static_cast<double>(s.solutions.size()));
  }
}

TEST_CASE("quantize and mode") {
  const std::vector<Point2> pts{{3.7, -1.2}, {1.0, 1.0}, {-1.0, -1.0}};
  const auto q = quantize(pts, 2.0);
  CHECK(q[0] == Point2{4, -2});
  CHECK(q[1] == Point2{2, 2});
  CHECK(q[2] == Point2{-2, -2});

  const std::vector<Point2> ints{{3, -4}, {0, 7}};
  CHECK(quantize(ints, 1.0) == ints);
  CHECK_THROWS_AS(quantize(ints, 0.0), Error);

  const std::vector<Point2> three{{0, 0}, {0, 0}, {2, 2}};
  CHECK(mode_cell(three) == Point2{0, 0});
  const std::vector<Point2> distinct{{3, 1}, {-1, 5}, {-1, 2}};
  CHECK(mode_cell(distinct) == Point2{-1, 2});
  CHECK_THROWS_AS(mode_cell(std::vector<Point2>{}), Error);

  std::mt19937_64 eng(12);
  std::uniform_int_distribution<int> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> ms;
    const int n = 1 + trial % 30;
    for (int i = 0; i < n; ++i) ms.push_back({static_cast<double>(u(eng)), static_cast<double>(u(eng))});
    Point2 best;
    int best_count = 0;
    for (int x = -3; x <= 3; ++x)
      for (int y = -3; y <= 3; ++y) {
        const Point2 c{static_cast<double>(x), static_cast<double>(y)};
        const int count = static_cast<int>(std::count(ms.begin(), ms.end(), c));
        if (count > best_count) {
          best_count = count;
          best = c;
        }
      }
    CHECK(mode_cell(ms) == best);
    int total = 0;
    for (const auto& h : heat_counts(ms)) total += h.count;
    CHECK(total == n);
  }
}

TEST_CASE("recursive refinement") {
  Scenario sc = small_scenario();
  sc.rf.bs_antennas = 16;
  const Point2 truth{3.3, -2.7};

  SUBCASE("level count") {
    for (auto [d_start, d_p] : std::vector<std::pair<double, double>>{
             {0.5, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {8, 1}, {2, 0.25}, {5, 0.5}}) {
      int rebuilds = 0;
      RefineOptions opts;
      opts.rebuild = [&](const Cell& c, std::uint64_t seed) {
        ++rebuilds;
        return synthetic_set(truth, 0.3, c, 40, seed);
      };
      const auto res = recursive_refine(sc, synthetic_set(truth, 1.5, sc.cell, 50, 1), d_start, d_p, opts);
      const int levels = expected_levels(d_start, d_p);
      CHECK(static_cast<int>(res.trace.size()) == levels);
      CHECK(rebuilds == levels - 1);
      CHECK(res.side == d_p);
      CHECK(res.trace.back().step == d_p);
      for (std::size_t l = 0; l < res.trace.size(); ++l) CHECK(res.trace[l].level == static_cast<int>(l) + 1);
    }
  }
  SUBCASE("single level returns the d_p mode") {
    const auto initial = synthetic_set(truth, 0.5, sc.cell, 60, 4);
    std::vector<Point2> pts;
    for (const auto& s : initial.solutions) pts.push_back(s.location);
    const auto res = recursive_refine(sc, initial, 0.5, 1.0, RefineOptions{});
    CHECK(res.trace.size() == 1u);
    CHECK(res.center == mode_cell(quantize(pts, 1.0)));
  }
  SUBCASE("refinement circles follow the modes") {
    RefineOptions opts;
    std::vector<Cell> circles;
    opts.rebuild = [&](const Cell& c, std::uint64_t seed) {
      circles.push_back(c);
      return synthetic_set(truth, 0.3, c, 40, seed);
    };
    const auto res = recursive_refine(sc, synthetic_set(truth, 1.0, sc.cell, 50, 2), 4, 1, opts);
    REQUIRE(circles.size() + 1 == res.trace.size());
    for (std::size_t i = 0; i < circles.size(); ++i) {
      CHECK(circles[i].center == res.trace[i].mode);
      CHECK(circles[i].radius == res.trace[i].step);
      CHECK(res.trace[i + 1].circle == circles[i]);
    }
  }
  SUBCASE("unimodal clouds are recovered") {
    std::mt19937_64 eng(99);
    // Modes kept well clear of the BS far-field boundary.
    std::uniform_real_distribution<double> ux(-3, 10);
    std::uniform_real_distribution<double> uy(-10, 10);
    for (int trial = 0; trial < 20; ++trial) {
      const Point2 mode{ux(eng), uy(eng)};
      RefineOptions opts;
      opts.rebuild = [&](const Cell& c, std::uint64_t seed) { return synthetic_set(mode, 0.3, c, 50, seed); };
      const auto res = recursive_refine(sc, synthetic_set(mode, 0.6, sc.cell, 50, trial), 2, 1, opts);
      CHECK(res.trace.size() == 2u);
      CHECK(distance(res.center, mode) <= 1.0);
    }
  }
  SUBCASE("final center stays feasible") {
    sc.obstacles = {make_circle({3, -3}, 0.8)};
    RefineOptions opts;
    opts.rebuild = [&](const Cell& c, std::uint64_t seed) { return synthetic_set({3, -3}, 0.4, c, 50, seed); };
    const auto res = recursive_refine(sc, synthetic_set({3, -3}, 0.8, sc.cell, 50, 5), 2, 1, opts);
    CHECK(sc.cell.contains(res.center));
    CHECK_FALSE(point_in_obstacle(res.center, sc.obstacles));
  }
}

TEST_CASE("full pipeline on a small scene") {
  Scenario sc = small_scenario();
  sc.rf.bs_antennas = 4;
  sc.obstacles = {make_wall({5, 0}, 16, kPi / 2)};
  const auto a = place(sc, 1);
  CHECK(a.trace.size() == 2u);
  CHECK(a.side == 1.0);
  CHECK(sc.cell.contains(a.center));
  CHECK_FALSE(point_in_obstacle(a.center, sc.obstacles));
  CHECK(a.metrics.coverage_with >= a.metrics.coverage_without);
  CHECK(a.metrics.draws == sc.placement.instantiations);

  const auto b = place(sc, 2);
  CHECK(a.center == b.center);
  CHECK(a.metrics.average_wsr == b.metrics.average_wsr);
}

TEST_CASE("random sites and average rates") {
  Scenario sc = small_scenario();
  sc.obstacles = {make_circle({0, 0}, 6)};
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Point2 p = random_site(sc, s);
    CHECK(sc.cell.contains(p));
    CHECK_FALSE(point_in_obstacle(p, sc.obstacles));
  }
  const double none = average_wsr(sc, SiteMode::None, std::nullopt, 4, 3, 1);
  CHECK(none == average_wsr(sc, SiteMode::None, std::nullopt, 4, 3, 2));
  CHECK(none > 0.0);
  const double fixed = average_wsr(sc, SiteMode::Fixed, Point2{0, 12}, 4, 3, 1);
  CHECK(fixed == average_wsr(sc, SiteMode::Fixed, Point2{0, 12}, 4, 3, 2));
}
