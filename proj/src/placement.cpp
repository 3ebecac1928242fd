// SPDX-License-Identifier: Apache-2.0
#include "risplace/placement.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "risplace/error.hpp"
#include "risplace/parallel.hpp"
#include "risplace/rng.hpp"

namespace risplace {

namespace {

struct Region {
  Cell disk;
  double density;
};

std::vector<Region> regions_of(const UserModel& model) {
  std::vector<Region> out;
  if (const auto* h = std::get_if<HomogeneousUsers>(&model)) {
    out.push_back({h->region, h->density});
  } else {
    for (const auto& spot : std::get<HotspotUsers>(model).hotspots) out.push_back({spot.region, spot.density});
  }
  return out;
}

double disk_area(const Cell& c) { return std::numbers::pi * c.radius * c.radius; }

Point2 uniform_in_disk(Engine& eng, const Cell& c, double angle_lo, double angle_hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = c.radius * std::sqrt(u(eng));
  const double a = angle_lo + (angle_hi - angle_lo) * u(eng);
  return {c.center.x + r * std::cos(a), c.center.y + r * std::sin(a)};
}

struct UserDraw {
  std::uint64_t attempt;
  std::vector<Point2> users;
};

// Non-empty user draws, `count` of them, addressed by attempt index.
std::vector<UserDraw> accepted_draws(const Scenario& sc, int count, std::uint64_t seed) {
  std::vector<UserDraw> draws;
  if (count <= 0) return draws;
  const std::uint64_t cap = 1000ULL * static_cast<std::uint64_t>(count);
  for (std::uint64_t a = 0; static_cast<int>(draws.size()) < count; ++a) {
    if (a >= cap)
      throw Error(ErrorCode::EmptyInput, "user model produced no users in " + std::to_string(cap) + " draws");
    auto users = sample_users(sc.users, sc.cell, sc.obstacles, derive_seed(seed, Stream::Instantiation, {a}));
    if (!users.empty()) draws.push_back({a, std::move(users)});
  }
  return draws;
}

bool better(const Solution& a, const Solution& b, Point2 center) {
  if (a.min_sinr != b.min_sinr) return a.min_sinr > b.min_sinr;
  const double da = distance(a.location, center);
  const double db = distance(b.location, center);
  if (da != db) return da < db;
  return a.location < b.location;
}

std::vector<Point2> locations(const SolutionSet& s) {
  std::vector<Point2> out;
  out.reserve(s.solutions.size());
  for (const auto& sol : s.solutions) out.push_back(sol.location);
  return out;
}

}  // namespace

double expected_users(const UserModel& model) {
  double e = 0.0;
  for (const auto& r : regions_of(model)) e += r.density * disk_area(r.disk);
  return e;
}

std::vector<Point2> sample_users(const UserModel& model, const Cell& cell,
                                 std::span<const Obstacle> obstacles, std::uint64_t seed) {
  Engine eng = make_engine(seed, Stream::Users);
  const auto regions = regions_of(model);
  std::vector<long> counts;
  for (const auto& r : regions) {
    const double mean = r.density * disk_area(r.disk);
    if (mean <= 0.0) {
      counts.push_back(0);
      continue;
    }
    std::poisson_distribution<long> pd(mean);
    counts.push_back(pd(eng));
  }
  std::vector<Point2> users;
  for (std::size_t j = 0; j < regions.size(); ++j) {
    long attempts = 0;
    long accepted = 0;
    while (accepted < counts[j]) {
      const Point2 p = uniform_in_disk(eng, regions[j].disk, 0.0, 2.0 * std::numbers::pi);
      ++attempts;
      if (cell.contains(p) && !point_in_obstacle(p, obstacles)) {
        users.push_back(p);
        ++accepted;
      } else if (attempts >= 1000 * (accepted + 1)) {
        throw Error(ErrorCode::RejectionOverflow,
                    "user region " + std::to_string(j) + " is almost entirely covered by obstacles");
      }
    }
  }
  return users;
}

bool feasible_site(Point2 q, Point2 bs, std::span<const Obstacle> obstacles, const Cell& cell,
                   double d_ff) {
  if (!cell.contains(q) || q == bs) return false;
  if (distance(q, bs) < d_ff) return false;
  if (point_in_obstacle(q, obstacles)) return false;
  return !segment_blocked(bs, q, obstacles);
}

CandidateSet build_candidate_set(Point2 bs, std::span<const Obstacle> obstacles, const Cell& cell,
                                 const Cell& circle, int T, double d_ff, std::uint64_t seed) {
  if (T < 1) throw Error(ErrorCode::ValidationError, "candidate count must be at least 1", "placement.candidates");
  Engine eng = make_engine(seed, Stream::Candidates);
  CandidateSet out;
  out.search_circle = circle;
  bool open[5] = {false, true, true, true, true};
  for (int i = 1; i <= T;) {
    int quadrant = i % 4 == 0 ? 4 : i % 4;
    int hops = 0;
    while (!open[quadrant] && hops < 4) {
      quadrant = quadrant % 4 + 1;
      ++hops;
    }
    if (!open[quadrant])
      throw Error(ErrorCode::InfeasibleQuadrant, "no quadrant of the search circle admits a RIS site");
    const double lo = (quadrant - 1) * 0.5 * std::numbers::pi;
    bool placed = false;
    for (int draw = 0; draw < kQuadrantDraws; ++draw) {
      const Point2 q = uniform_in_disk(eng, circle, lo, lo + 0.5 * std::numbers::pi);
      if (feasible_site(q, bs, obstacles, cell, d_ff)) {
        out.points.push_back(q);
        out.quadrant.push_back(quadrant);
        placed = true;
        break;
      }
    }
    if (placed) {
      ++i;
    } else {
      open[quadrant] = false;
      out.skipped_quadrants.push_back(quadrant);
    }
  }
  return out;
}

CandidateScore evaluate_candidate(const Scenario& sc, std::optional<Point2> q,
                                  std::span<const Point2> users, ChannelSeeds seeds) {
  if (users.empty()) return {std::numeric_limits<double>::infinity(), 0.0, 0};
  const ChannelSet cs = sample_channels(sc.bs, sc.obstacles, sc.rf, q, users, seeds);
  const FpState s = solve(cs, sc.rf, sc.solver);
  const double noise = sc.rf.noise_mw();
  return {min_sinr(cs, s, noise), wsr(cs, s.W, s.theta(), noise), s.iteration};
}

SolutionSet build_solution_set(const Scenario& sc, const Cell& circle, int n_inst, int T,
                               std::uint64_t seed, int threads) {
  if (n_inst < 1) throw Error(ErrorCode::ValidationError, "instantiation count must be at least 1", "placement.instantiations");
  const double d_ff = sc.rf.fraunhofer_m();
  const auto draws = accepted_draws(sc, n_inst, seed);

  SolutionSet out;
  out.circle = circle;
  out.solutions.resize(draws.size());
  out.candidate_sets.resize(draws.size());
  parallel_for(draws.size(), threads, [&](std::size_t j) {
    const auto idx = static_cast<std::uint64_t>(j);
    CandidateSet cand = build_candidate_set(sc.bs, sc.obstacles, sc.cell, circle, T, d_ff,
                                            derive_seed(seed, Stream::Candidates, {idx}));
    const std::uint64_t direct = derive_seed(seed, Stream::DirectLink, {idx});
    const auto& users = draws[j].users;
    Solution best;
    bool have = false;
    for (std::size_t c = 0; c < cand.points.size(); ++c) {
      const ChannelSeeds seeds{direct, derive_seed(seed, Stream::BsRisLink, {idx, c})};
      const CandidateScore score = evaluate_candidate(sc, cand.points[c], users, seeds);
      Solution sol{cand.points[c], static_cast<int>(j), static_cast<int>(c),
                   static_cast<int>(users.size()), score.min_sinr, score.wsr};
      if (!have || better(sol, best, circle.center)) {
        best = sol;
        have = true;
      }
    }
    out.solutions[j] = best;
    out.candidate_sets[j] = std::move(cand);
  });
  return out;
}

std::vector<Point2> quantize(std::span<const Point2> points, double d) {
  if (!(d > 0)) throw Error(ErrorCode::ValidationError, "quantization step must be positive");
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) out.push_back({std::round(p.x / d) * d, std::round(p.y / d) * d});
  return out;
}

std::vector<HeatCell> heat_counts(std::span<const Point2> quantized) {
  std::map<Point2, int> counts;
  for (const Point2& p : quantized) ++counts[p];
  std::vector<HeatCell> out;
  out.reserve(counts.size());
  for (const auto& [p, n] : counts) out.push_back({p, n});
  return out;
}

Point2 mode_cell(std::span<const Point2> quantized) {
  if (quantized.empty()) throw Error(ErrorCode::EmptyInput, "mode of an empty set");
  const auto heat = heat_counts(quantized);
  const HeatCell* best = &heat.front();
  for (const auto& h : heat)
    if (h.count > best->count) best = &h;
  return best->cell;
}

Point2 final_center(const Scenario& sc, std::span<const Point2> solutions, double d_p) {
  if (solutions.empty()) throw Error(ErrorCode::EmptyInput, "no solutions to place the RIS from");
  const auto q = quantize(solutions, d_p);
  auto heat = heat_counts(q);
  std::stable_sort(heat.begin(), heat.end(), [](const HeatCell& a, const HeatCell& b) { return a.count > b.count; });
  const double d_ff = sc.rf.fraunhofer_m();
  for (const auto& h : heat)
    if (feasible_site(h.cell, sc.bs, sc.obstacles, sc.cell, d_ff)) return h.cell;
  const Point2 mode = heat.front().cell;
  return *std::min_element(solutions.begin(), solutions.end(), [&](Point2 a, Point2 b) {
    const double da = distance(a, mode);
    const double db = distance(b, mode);
    return da != db ? da < db : a < b;
  });
}

PlacementResult recursive_refine(const Scenario& sc, SolutionSet initial, double d_start, double d_p,
                                 const RefineOptions& opts) {
  if (!(d_p > 0) || !(d_start > 0))
    throw Error(ErrorCode::ValidationError, "quantization steps must be positive", "placement.d_p");
  PlacementResult res;
  res.side = d_p;
  SolutionSet current = std::move(initial);
  double d = d_start;
  for (int level = 1;; ++level) {
    const bool last = d <= d_p * (1.0 + 1e-12);
    const double step = last ? d_p : d;
    const auto pts = locations(current);
    const auto q = quantize(pts, step);

    LevelTrace tr;
    tr.level = level;
    tr.step = step;
    tr.circle = current.circle;
    tr.heat = heat_counts(q);
    if (last) {
      res.center = final_center(sc, pts, d_p);
      tr.mode = res.center;
    } else {
      tr.mode = mode_cell(q);
    }
    res.trace.push_back(tr);
    res.levels.push_back(current);
    if (opts.on_level) opts.on_level(tr);
    if (last) break;

    const Cell circle{tr.mode, opts.radius.value_or(step)};
    const std::uint64_t seed = derive_seed(opts.seed, Stream::Level, {static_cast<std::uint64_t>(level)});
    current = opts.rebuild ? opts.rebuild(circle, seed)
                           : build_solution_set(sc, circle, opts.instantiations, opts.candidates, seed, opts.threads);
    d /= 2.0;
  }
  return res;
}

PlacementResult place(const Scenario& sc, int threads, std::function<void(const LevelTrace&)> on_level) {
  const auto& pc = sc.placement;
  SolutionSet first = build_solution_set(sc, sc.cell, pc.instantiations, pc.candidates,
                                         derive_seed(sc.seed, Stream::Level, {0}), threads);
  RefineOptions opts;
  opts.candidates = pc.candidates;
  opts.instantiations = pc.instantiations;
  opts.radius = pc.refine_radius;
  opts.threads = threads;
  opts.seed = sc.seed;
  opts.on_level = std::move(on_level);
  PlacementResult res = recursive_refine(sc, std::move(first), pc.d_start, pc.d_p, opts);
  res.metrics = site_metrics(sc, res.center, threads);
  return res;
}

Point2 random_site(const Scenario& sc, std::uint64_t seed) {
  Engine eng = make_engine(seed, Stream::RandomSite);
  for (int i = 0; i < 1000000; ++i) {
    const Point2 p = uniform_in_disk(eng, sc.cell, 0.0, 2.0 * std::numbers::pi);
    if (!point_in_obstacle(p, sc.obstacles) && p != sc.bs) return p;
  }
  throw Error(ErrorCode::RejectionOverflow, "cell is covered by obstacles");
}

double average_wsr(const Scenario& sc, SiteMode mode, std::optional<Point2> site, int draws,
                   std::uint64_t seed, int threads) {
  const auto batch = accepted_draws(sc, draws, seed);
  std::vector<double> rates(batch.size(), 0.0);
  parallel_for(batch.size(), threads, [&](std::size_t j) {
    const auto idx = static_cast<std::uint64_t>(j);
    std::optional<Point2> where;
    if (mode == SiteMode::Fixed) where = site;
    if (mode == SiteMode::Random) where = random_site(sc, derive_seed(seed, Stream::RandomSite, {idx}));
    const ChannelSeeds seeds{derive_seed(seed, Stream::DirectLink, {idx}),
                             derive_seed(seed, Stream::BsRisLink, {idx})};
    rates[j] = evaluate_candidate(sc, where, batch[j].users, seeds).wsr;
  });
  double sum = 0.0;
  for (double r : rates) sum += r;
  return rates.empty() ? 0.0 : sum / static_cast<double>(rates.size());
}

PlacementMetrics site_metrics(const Scenario& sc, Point2 site, int threads) {
  PlacementMetrics m;
  m.coverage_without = coverage(sc.cell, sc.bs, sc.obstacles, std::nullopt, sc.placement.grid_resolution).fraction;
  m.coverage_with = coverage(sc.cell, sc.bs, sc.obstacles, site, sc.placement.grid_resolution).fraction;
  const std::uint64_t seed = derive_seed(sc.seed, Stream::Metrics);
  m.draws = sc.placement.instantiations;
  m.average_wsr = average_wsr(sc, SiteMode::Fixed, site, m.draws, seed, threads);
  m.average_wsr_without = average_wsr(sc, SiteMode::None, std::nullopt, m.draws, seed, threads);
  return m;
}

}  // namespace risplace
