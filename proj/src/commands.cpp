// SPDX-License-Identifier: Apache-2.0
#include "risplace/commands.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "risplace/error.hpp"
#include "risplace/rng.hpp"
#include "risplace/scenario_io.hpp"

namespace risplace {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::ofstream open_output(const RunContext& ctx, const std::string& name) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  const fs::path p = ctx.out_dir / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_json(const RunContext& ctx, const std::string& name, const ojson& j) {
  auto out = open_output(ctx, name);
  out << j.dump(2) << '\n';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = s.find(sep, start);
    parts.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw Error(ErrorCode::ValidationError, std::string(what) + ": not a number: '" + std::string(text) + "'",
                std::string(what));
  return v;
}

ojson point_json(Point2 p) { return ojson::array({p.x, p.y}); }

std::optional<std::vector<Point2>> first_nonempty_draw(const Scenario& sc) {
  for (std::uint64_t a = 0; a < 1000; ++a) {
    auto users = sample_users(sc.users, sc.cell, sc.obstacles, derive_seed(sc.seed, Stream::Instantiation, {a}));
    if (!users.empty()) return users;
  }
  return std::nullopt;
}

void note(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

struct SolutionRow {
  int level{};
  std::string x;
  std::string y;
  Point2 location;
};

// Rows of solutions.csv; the location is re-parsed from the written text.
std::vector<SolutionRow> read_solutions(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::VerifyMismatch, "solutions.csv is empty");
  const auto header = split(trim(line), ',');
  auto column = [&](std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorCode::VerifyMismatch, "solutions.csv lacks column " + std::string(name));
  };
  const std::size_t cl = column("level");
  const std::size_t cx = column("x");
  const std::size_t cy = column("y");
  std::vector<SolutionRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != header.size()) throw Error(ErrorCode::VerifyMismatch, "malformed solutions.csv row: " + line);
    SolutionRow r;
    r.level = static_cast<int>(parse_double(f[cl], "solutions.csv level"));
    r.x = std::string(f[cx]);
    r.y = std::string(f[cy]);
    r.location = {parse_double(f[cx], "solutions.csv x"), parse_double(f[cy], "solutions.csv y")};
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Point2 parse_point(std::string_view text, std::string_view what) {
  const auto parts = split(trim(text), ',');
  if (parts.size() != 2)
    throw Error(ErrorCode::ValidationError, std::string(what) + ": expected x,y", std::string(what));
  return {parse_double(parts[0], what), parse_double(parts[1], what)};
}

std::vector<Point2> parse_points(std::string_view text, std::string_view what) {
  std::vector<Point2> pts;
  for (auto part : split(trim(text), ';')) {
    if (trim(part).empty()) continue;
    pts.push_back(parse_point(part, what));
  }
  return pts;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> v;
  for (auto part : split(trim(text), ',')) v.push_back(parse_double(part, what));
  if (v.empty()) throw Error(ErrorCode::ValidationError, std::string(what) + ": empty list", std::string(what));
  return v;
}

BeamformReport cmd_beamform(const Scenario& sc, const BeamformRequest& req, const RunContext& ctx) {
  BeamformReport rep;
  if (req.users) {
    rep.users = *req.users;
  } else {
    auto drawn = first_nonempty_draw(sc);
    if (!drawn) throw Error(ErrorCode::EmptyInput, "user model produced no users in 1000 draws");
    rep.users = std::move(*drawn);
  }
  if (rep.users.empty()) throw Error(ErrorCode::EmptyInput, "no users to serve");
  if (req.ris && point_in_obstacle(*req.ris, sc.obstacles))
    throw Error(ErrorCode::ValidationError, "--ris lies inside an obstacle", "--ris");

  const ChannelSeeds seeds{derive_seed(sc.seed, Stream::DirectLink, {0}),
                           derive_seed(sc.seed, Stream::BsRisLink, {0, 0})};
  const ChannelSet cs = sample_channels(sc.bs, sc.obstacles, sc.rf, req.ris, rep.users, seeds);
  const double noise = sc.rf.noise_mw();
  const FpState s = solve(cs, sc.rf.pmax_mw(), noise, sc.solver);
  rep.objective = s.objective_history;
  rep.wsr = s.wsr_history;
  rep.sinr = sinrs(cs, s.W, s.theta(), noise);
  rep.final_wsr = wsr(cs, s.W, s.theta(), noise);

  {
    auto out = open_output(ctx, "convergence.csv");
    out << "iteration,objective_bits,wsr_bps_hz\n";
    for (std::size_t t = 0; t < rep.objective.size(); ++t) {
      out << (t + 1) << ',' << format_number(rep.objective[t]) << ',' << format_number(rep.wsr[t]) << '\n';
      note(ctx, "iter " + std::to_string(t + 1) + "  objective " + format_number(rep.objective[t]) + "  wsr " +
                    format_number(rep.wsr[t]));
    }
  }
  {
    auto out = open_output(ctx, "sinr.csv");
    out << "user,x,y,sinr,sinr_db\n";
    for (std::size_t k = 0; k < rep.users.size(); ++k) {
      out << k << ',' << format_number(rep.users[k].x) << ',' << format_number(rep.users[k].y) << ','
          << format_number(rep.sinr[k]) << ',' << format_number(linear_to_db(rep.sinr[k])) << '\n';
      note(ctx, "user " + std::to_string(k) + "  sinr_db " + format_number(linear_to_db(rep.sinr[k])));
    }
  }
  note(ctx, "final wsr " + format_number(rep.final_wsr) + " bit/s/Hz");
  return rep;
}

PlacementResult cmd_place(const Scenario& sc, const RunContext& ctx) {
  auto on_level = [&](const LevelTrace& tr) {
    note(ctx, "level " + std::to_string(tr.level) + "  step " + format_number(tr.step) + "  mode (" +
                  format_number(tr.mode.x) + ", " + format_number(tr.mode.y) + ")");
  };
  PlacementResult res = place(sc, ctx.threads, on_level);

  {
    auto out = open_output(ctx, "solutions.csv");
    out << "level,step,circle_x,circle_y,circle_r,instantiation,candidate,users,x,y,min_sinr,wsr\n";
    for (std::size_t l = 0; l < res.levels.size(); ++l) {
      const auto& tr = res.trace[l];
      for (const auto& s : res.levels[l].solutions) {
        out << tr.level << ',' << format_number(tr.step) << ',' << format_number(tr.circle.center.x) << ','
            << format_number(tr.circle.center.y) << ',' << format_number(tr.circle.radius) << ','
            << s.instantiation << ',' << s.candidate << ',' << s.users << ',' << format_number(s.location.x)
            << ',' << format_number(s.location.y) << ',' << format_number(s.min_sinr) << ','
            << format_number(s.wsr) << '\n';
      }
    }
  }
  {
    auto out = open_output(ctx, "heatmap.csv");
    out << "level,step,x,y,count\n";
    for (const auto& tr : res.trace)
      for (const auto& h : tr.heat)
        out << tr.level << ',' << format_number(tr.step) << ',' << format_number(h.cell.x) << ','
            << format_number(h.cell.y) << ',' << h.count << '\n';
  }

  ojson region;
  region["center"] = point_json(res.center);
  region["side_m"] = res.side;
  region["levels"] = res.trace.size();
  region["trace"] = ojson::array();
  for (const auto& tr : res.trace) {
    ojson t;
    t["level"] = tr.level;
    t["step_m"] = tr.step;
    t["mode"] = point_json(tr.mode);
    t["circle"] = {{"center", point_json(tr.circle.center)}, {"radius_m", tr.circle.radius}};
    t["solutions"] = res.levels[static_cast<std::size_t>(tr.level - 1)].solutions.size();
    region["trace"].push_back(t);
  }
  write_json(ctx, "final_region.json", region);

  const auto& m = res.metrics;
  ojson metrics;
  metrics["seed"] = sc.seed;
  metrics["center"] = point_json(res.center);
  metrics["coverage_without_ris"] = m.coverage_without;
  metrics["coverage_with_ris"] = m.coverage_with;
  metrics["average_wsr"] = m.average_wsr;
  metrics["average_wsr_without_ris"] = m.average_wsr_without;
  metrics["draws"] = m.draws;
  write_json(ctx, "metrics.json", metrics);

  {
    auto out = open_output(ctx, "scenario.json");
    out << emit_scenario(sc);
  }
  note(ctx, "final center (" + format_number(res.center.x) + ", " + format_number(res.center.y) + ")  coverage " +
                format_number(m.coverage_without) + " -> " + format_number(m.coverage_with) + "  average wsr " +
                format_number(m.average_wsr) + " (no RIS " + format_number(m.average_wsr_without) + ")");
  return res;
}

CoverageMap cmd_coverage(const Scenario& sc, std::optional<Point2> ris, const RunContext& ctx) {
  CoverageMap map = coverage(sc.cell, sc.bs, sc.obstacles, ris, sc.placement.grid_resolution);
  auto out = open_output(ctx, "coverage.csv");
  out << "x,y,covered\n";
  for (const auto& p : map.points)
    out << format_number(p.point.x) << ',' << format_number(p.point.y) << ',' << (p.covered ? 1 : 0) << '\n';
  note(ctx, "coverage " + format_number(map.fraction) + " over " + std::to_string(map.points.size()) + " points");
  return map;
}

std::vector<SweepRow> cmd_sweep_power(const Scenario& sc, const std::vector<std::string>& modes,
                                      const std::vector<double>& pmax_dbm, std::optional<Point2> optimal_site,
                                      int draws, const RunContext& ctx) {
  if (draws < 1) throw Error(ErrorCode::ValidationError, "draw count must be at least 1", "--draws");
  std::vector<SiteMode> kinds;
  for (const auto& m : modes) {
    if (m == "optimal") {
      if (!optimal_site)
        throw Error(ErrorCode::ValidationError, "optimal mode needs a placement result", "--placement");
      kinds.push_back(SiteMode::Fixed);
    } else if (m == "random") {
      kinds.push_back(SiteMode::Random);
    } else if (m == "none") {
      kinds.push_back(SiteMode::None);
    } else {
      throw Error(ErrorCode::ValidationError, "unknown mode '" + m + "'", "--mode");
    }
  }
  const std::uint64_t seed = derive_seed(sc.seed, Stream::Sweep);
  std::vector<SweepRow> rows;
  for (double p : pmax_dbm) {
    Scenario at = sc;
    at.rf.pmax_dbm = p;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double v = average_wsr(at, kinds[i], optimal_site, draws, seed, ctx.threads);
      rows.push_back({p, modes[i], v, draws});
      note(ctx, "pmax " + format_number(p) + " dBm  " + modes[i] + "  " + format_number(v));
    }
  }
  auto out = open_output(ctx, "sweep.csv");
  out << "pmax_dbm,mode,average_wsr,draws\n";
  for (const auto& r : rows)
    out << format_number(r.pmax_dbm) << ',' << r.mode << ',' << format_number(r.average_wsr) << ',' << r.draws
        << '\n';
  return rows;
}

std::vector<std::vector<Point2>> cmd_sample_users(const Scenario& sc, int draws, const RunContext& ctx) {
  if (draws < 1) throw Error(ErrorCode::ValidationError, "draw count must be at least 1", "--draws");
  std::vector<std::vector<Point2>> all;
  auto out = open_output(ctx, "users.csv");
  out << "draw,x,y\n";
  for (int d = 0; d < draws; ++d) {
    all.push_back(sample_users(sc.users, sc.cell, sc.obstacles,
                               derive_seed(sc.seed, Stream::Instantiation, {static_cast<std::uint64_t>(d)})));
    for (const Point2& p : all.back())
      out << d << ',' << format_number(p.x) << ',' << format_number(p.y) << '\n';
  }
  std::size_t total = 0;
  for (const auto& u : all) total += u.size();
  note(ctx, std::to_string(total) + " users over " + std::to_string(draws) + " draws (expected " +
                format_number(expected_users(sc.users) * draws) + ")");
  return all;
}

Point2 read_final_center(const fs::path& path) {
  const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("center") || !j["center"].is_array() || j["center"].size() != 2)
    throw Error(ErrorCode::ParseError, path.string() + ": expected an object with a center [x, y]");
  return {j["center"][0].get<double>(), j["center"][1].get<double>()};
}

VerifyReport cmd_verify(const Scenario& scenario, const RunContext& ctx) {
  VerifyReport rep;
  auto mismatch = [&](const std::string& what) {
    rep.mismatches.push_back(what);
    note(ctx, "mismatch: " + what);
  };

  const auto metrics = nlohmann::json::parse(read_file(ctx.out_dir / "metrics.json"));
  Scenario sc = scenario;
  sc.seed = metrics.at("seed").get<std::uint64_t>();

  const auto rows = read_solutions(ctx.out_dir / "solutions.csv");
  if (rows.empty()) throw Error(ErrorCode::VerifyMismatch, "solutions.csv has no rows");
  int last = 0;
  std::map<int, std::vector<Point2>> by_level;
  for (const auto& r : rows) {
    by_level[r.level].push_back(r.location);
    last = std::max(last, r.level);
  }

  // Heat map counts per level.
  {
    std::istringstream in(read_file(ctx.out_dir / "heatmap.csv"));
    std::string line;
    std::getline(in, line);
    std::map<std::pair<int, std::pair<std::string, std::string>>, int> stored;
    std::map<int, double> steps;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      const auto f = split(trim(line), ',');
      if (f.size() != 5) throw Error(ErrorCode::VerifyMismatch, "malformed heatmap.csv row: " + line);
      const int level = static_cast<int>(parse_double(f[0], "heatmap.csv level"));
      steps[level] = parse_double(f[1], "heatmap.csv step");
      stored[{level, {std::string(f[2]), std::string(f[3])}}] =
          static_cast<int>(parse_double(f[4], "heatmap.csv count"));
    }
    std::map<std::pair<int, std::pair<std::string, std::string>>, int> recomputed;
    for (const auto& [level, pts] : by_level) {
      if (!steps.count(level)) {
        mismatch("heatmap.csv lacks level " + std::to_string(level));
        continue;
      }
      for (const auto& h : heat_counts(quantize(pts, steps[level])))
        recomputed[{level, {format_number(h.cell.x), format_number(h.cell.y)}}] += h.count;
    }
    if (recomputed != stored) mismatch("heatmap.csv counts differ from the quantized solutions");
  }

  const Point2 center = final_center(sc, by_level[last], sc.placement.d_p);
  const Point2 stored_center = read_final_center(ctx.out_dir / "final_region.json");
  if (!(center == stored_center))
    mismatch("final center (" + format_number(center.x) + ", " + format_number(center.y) +
             ") differs from final_region.json (" + format_number(stored_center.x) + ", " +
             format_number(stored_center.y) + ")");
  const Point2 metrics_center{metrics.at("center")[0].get<double>(), metrics.at("center")[1].get<double>()};
  if (!(metrics_center == stored_center)) mismatch("metrics.json center differs from final_region.json");

  const PlacementMetrics m = site_metrics(sc, center, ctx.threads);
  auto check = [&](const char* key, double v) {
    const double stored = metrics.at(key).get<double>();
    if (stored != v) mismatch(std::string(key) + ": stored " + format_number(stored) + ", recomputed " + format_number(v));
  };
  check("coverage_without_ris", m.coverage_without);
  check("coverage_with_ris", m.coverage_with);
  check("average_wsr", m.average_wsr);
  check("average_wsr_without_ris", m.average_wsr_without);
  if (metrics.at("draws").get<int>() != m.draws) mismatch("draws differ");

  rep.ok = rep.mismatches.empty();
  note(ctx, rep.ok ? "verify: ok" : "verify: " + std::to_string(rep.mismatches.size()) + " mismatch(es)");
  return rep;
}

}  // namespace risplace
