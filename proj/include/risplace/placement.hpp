// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "risplace/scenario.hpp"

namespace risplace {

/// One PPP draw. Positions are uniform in their region and redrawn until they
/// fall inside the cell and outside every obstacle.
std::vector<Point2> sample_users(const UserModel& model, const Cell& cell,
                                 std::span<const Obstacle> obstacles, std::uint64_t seed);

/// A RIS site must see the BS, sit in the BS far field, lie in the cell and
/// stay clear of the obstacles.
bool feasible_site(Point2 q, Point2 bs, std::span<const Obstacle> obstacles, const Cell& cell,
                   double d_ff);

struct CandidateSet {
  std::vector<Point2> points;
  std::vector<int> quadrant;  // 1..4 for each point
  Cell search_circle;
  std::vector<int> skipped_quadrants;
};

/// Draws exactly T feasible candidates, candidate i (1-based) in quadrant
/// (i mod 4) of the search circle. A quadrant without an acceptance in
/// kQuadrantDraws tries is skipped and its share moves to the next feasible
/// quadrant.
CandidateSet build_candidate_set(Point2 bs, std::span<const Obstacle> obstacles, const Cell& cell,
                                 const Cell& circle, int T, double d_ff, std::uint64_t seed);

inline constexpr int kQuadrantDraws = 100000;

struct CandidateScore {
  double min_sinr{};
  double wsr{};
  int iterations{};
};

/// Joint beamforming for a RIS at q. Without users the min-SINR is +inf.
CandidateScore evaluate_candidate(const Scenario& sc, std::optional<Point2> q,
                                  std::span<const Point2> users, ChannelSeeds seeds);

struct Solution {
  Point2 location;
  int instantiation{};    // index of the accepted draw
  int candidate{};        // index into that draw's candidate set
  int users{};
  double min_sinr{};
  double wsr{};
};

struct SolutionSet {
  Cell circle;
  std::vector<Solution> solutions;
  std::vector<CandidateSet> candidate_sets;  // parallel to solutions
};

/// Runs `n_inst` non-empty user draws; for each, the candidate with the
/// largest min-SINR (ties: nearer the circle center, then lexicographic).
SolutionSet build_solution_set(const Scenario& sc, const Cell& circle, int n_inst, int T,
                               std::uint64_t seed, int threads = 1);

/// round-half-away-from-zero(c / d) * d, component-wise.
std::vector<Point2> quantize(std::span<const Point2> points, double d);

/// Most frequent point; ties go to the lexicographically smallest.
Point2 mode_cell(std::span<const Point2> quantized);

struct HeatCell {
  Point2 cell;
  int count{};
};

std::vector<HeatCell> heat_counts(std::span<const Point2> quantized);

struct LevelTrace {
  int level{};                 // 1-based
  double step{};               // quantization step of this level
  Point2 mode;
  Cell circle;                 // circle the level's solutions were drawn in
  std::vector<HeatCell> heat;
};

struct PlacementMetrics {
  double coverage_without{};
  double coverage_with{};
  double average_wsr{};
  double average_wsr_without{};
  int draws{};
};

struct PlacementResult {
  Point2 center;
  double side{};
  std::vector<LevelTrace> trace;
  std::vector<SolutionSet> levels;  // parallel to trace
  PlacementMetrics metrics;
};

struct RefineOptions {
  int candidates = 40;
  int instantiations = 50;
  std::optional<double> radius;
  int threads = 1;
  std::uint64_t seed = 1;
  /// Observer called after each level completes.
  std::function<void(const LevelTrace&)> on_level;
  /// Replaces build_solution_set when refining (circle, level seed).
  std::function<SolutionSet(const Cell&, std::uint64_t)> rebuild;
};

/// Coarse-to-fine refinement. Level l quantizes its solutions at
/// max(d_start / 2^(l-1), d_p); while that step exceeds d_p, a new solution
/// set is drawn in a circle of radius r (default: the step) around the mode.
/// The last level quantizes at d_p and its most frequent feasible cell is the
/// final d_p x d_p region.
PlacementResult recursive_refine(const Scenario& sc, SolutionSet initial, double d_start, double d_p,
                                 const RefineOptions& opts);

/// Final center from the last level's solutions: the most frequent feasible
/// cell at step d_p, falling back to the best solution itself.
Point2 final_center(const Scenario& sc, std::span<const Point2> solutions, double d_p);

/// Full pipeline: solution set over the cell, then recursive refinement.
PlacementResult place(const Scenario& sc, int threads = 1,
                      std::function<void(const LevelTrace&)> on_level = {});

/// Coverage with and without the RIS at `site` plus the average WSR over
/// the scenario's instantiation count of fresh user draws.
PlacementMetrics site_metrics(const Scenario& sc, Point2 site, int threads = 1);

/// Average WSR over `draws` non-empty user draws with the RIS at the given
/// site, a per-draw random feasible-in-cell site, or none.
enum class SiteMode { Fixed, Random, None };
double average_wsr(const Scenario& sc, SiteMode mode, std::optional<Point2> site, int draws,
                   std::uint64_t seed, int threads = 1);

/// Uniform point of the cell outside all obstacles.
Point2 random_site(const Scenario& sc, std::uint64_t seed);

}  // namespace risplace
