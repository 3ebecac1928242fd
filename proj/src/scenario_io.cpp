// SPDX-License-Identifier: Apache-2.0
#include "risplace/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "risplace/error.hpp"

namespace risplace {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ValidationError, path + ": " + msg, path);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path.empty() ? "<root>" : path, "expected an object");
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      invalid(join(path, key), "unknown key");
  }
}

const json& required(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) invalid(join(path, key), "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(path, "must be finite");
  return v;
}

double number_at(const json& j, const std::string& path, const char* key) {
  return number(required(j, path, key), join(path, key));
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
  return j.contains(key) ? number(j.at(key), join(path, key)) : fallback;
}

int integer_at(const json& j, const std::string& path, const char* key, std::optional<int> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    invalid(join(path, key), "missing");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer()) invalid(join(path, key), "expected an integer");
  return v.get<int>();
}

Point2 point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) invalid(path, "expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

Cell disk(const json& j, const std::string& path) {
  expect_object(j, path);
  only_keys(j, path, {"center", "radius_m"});
  return {point(required(j, path, "center"), join(path, "center")), number_at(j, path, "radius_m")};
}

Obstacle obstacle(const json& j, const std::string& path) {
  expect_object(j, path);
  const json& type = required(j, path, "type");
  if (type == "circle") {
    only_keys(j, path, {"type", "center", "radius_m"});
    return Circle{point(required(j, path, "center"), join(path, "center")), number_at(j, path, "radius_m")};
  }
  if (type == "wall") {
    only_keys(j, path, {"type", "center", "length_m", "orientation_rad"});
    // Orientation is stored as given; validate() insists on [0, pi).
    return Wall{point(required(j, path, "center"), join(path, "center")), number_at(j, path, "length_m"),
                number_at(j, path, "orientation_rad")};
  }
  invalid(join(path, "type"), "expected \"circle\" or \"wall\"");
}

UserModel user_model(const json& j, const std::string& path, const Cell& cell) {
  expect_object(j, path);
  const json& model = required(j, path, "model");
  if (model == "homogeneous") {
    only_keys(j, path, {"model", "density_per_m2", "region"});
    HomogeneousUsers h;
    h.density = number_at(j, path, "density_per_m2");
    h.region = j.contains("region") ? disk(j.at("region"), join(path, "region")) : cell;
    return h;
  }
  if (model == "hotspots") {
    only_keys(j, path, {"model", "hotspots"});
    const json& arr = required(j, path, "hotspots");
    if (!arr.is_array()) invalid(join(path, "hotspots"), "expected an array");
    HotspotUsers h;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = join(path, "hotspots[" + std::to_string(i) + "]");
      expect_object(arr[i], p);
      only_keys(arr[i], p, {"center", "radius_m", "density_per_m2"});
      h.hotspots.push_back({Cell{point(required(arr[i], p, "center"), join(p, "center")),
                                 number_at(arr[i], p, "radius_m")},
                            number_at(arr[i], p, "density_per_m2")});
    }
    return h;
  }
  invalid(join(path, "model"), "expected \"homogeneous\" or \"hotspots\"");
}

RfParams rf_params(const json& j, const std::string& path) {
  expect_object(j, path);
  only_keys(j, path, {"fc_ghz", "bandwidth_hz", "noise_figure_db", "pmax_dbm", "t1_db", "t2_db", "bs_antennas",
                      "ris_elements", "spacing_wavelengths", "array_axis_rad"});
  RfParams rf;
  rf.carrier_ghz = number_or(j, path, "fc_ghz", rf.carrier_ghz);
  rf.bandwidth_hz = number_or(j, path, "bandwidth_hz", rf.bandwidth_hz);
  rf.noise_figure_db = number_or(j, path, "noise_figure_db", rf.noise_figure_db);
  rf.pmax_dbm = number_or(j, path, "pmax_dbm", rf.pmax_dbm);
  rf.t1_db = number_or(j, path, "t1_db", rf.t1_db);
  rf.t2_db = number_or(j, path, "t2_db", rf.t2_db);
  rf.bs_antennas = integer_at(j, path, "bs_antennas", rf.bs_antennas);
  rf.ris_elements = integer_at(j, path, "ris_elements", rf.ris_elements);
  rf.spacing = number_or(j, path, "spacing_wavelengths", rf.spacing);
  rf.array_axis = number_or(j, path, "array_axis_rad", rf.array_axis);
  return rf;
}

PlacementConfig placement_config(const json& j, const std::string& path) {
  expect_object(j, path);
  only_keys(j, path, {"candidates", "instantiations", "d_start_m", "d_p_m", "refine_radius_m", "grid_resolution_m"});
  PlacementConfig pc;
  pc.candidates = integer_at(j, path, "candidates", pc.candidates);
  pc.instantiations = integer_at(j, path, "instantiations", pc.instantiations);
  pc.d_start = number_or(j, path, "d_start_m", pc.d_start);
  pc.d_p = number_or(j, path, "d_p_m", pc.d_p);
  if (j.contains("refine_radius_m") && !j.at("refine_radius_m").is_null())
    pc.refine_radius = number(j.at("refine_radius_m"), join(path, "refine_radius_m"));
  pc.grid_resolution = number_or(j, path, "grid_resolution_m", pc.grid_resolution);
  return pc;
}

SolverConfig solver_config(const json& j, const std::string& path) {
  expect_object(j, path);
  only_keys(j, path, {"max_iters", "rel_tol", "extrapolation", "fixed_epsilon", "kappa0", "backtrack_factor"});
  SolverConfig cfg;
  cfg.max_iters = integer_at(j, path, "max_iters", cfg.max_iters);
  cfg.rel_tol = number_or(j, path, "rel_tol", cfg.rel_tol);
  if (j.contains("extrapolation")) {
    const json& e = j.at("extrapolation");
    if (e == "nesterov") cfg.extrapolation = Extrapolation::Nesterov;
    else if (e == "none") cfg.extrapolation = Extrapolation::None;
    else if (e == "fixed") cfg.extrapolation = Extrapolation::Fixed;
    else invalid(join(path, "extrapolation"), "expected \"nesterov\", \"none\" or \"fixed\"");
  }
  cfg.fixed_epsilon = number_or(j, path, "fixed_epsilon", cfg.fixed_epsilon);
  if (j.contains("kappa0") && !j.at("kappa0").is_null()) cfg.kappa0 = number(j.at("kappa0"), join(path, "kappa0"));
  cfg.backtrack_factor = number_or(j, path, "backtrack_factor", cfg.backtrack_factor);
  return cfg;
}

ojson point_json(Point2 p) { return ojson::array({p.x, p.y}); }

ojson disk_json(const Cell& c) {
  ojson j;
  j["center"] = point_json(c.center);
  j["radius_m"] = c.radius;
  return j;
}

const char* extrapolation_name(Extrapolation e) {
  switch (e) {
    case Extrapolation::None: return "none";
    case Extrapolation::Fixed: return "fixed";
    case Extrapolation::Nesterov: break;
  }
  return "nesterov";
}

}  // namespace

void validate(const Scenario& sc) {
  if (!std::isfinite(sc.bs.x) || !std::isfinite(sc.bs.y)) invalid("bs", "must be finite");
  if (!(sc.cell.radius > 0)) invalid("cell.radius_m", "must be positive");
  for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
    const std::string p = "obstacles[" + std::to_string(i) + "]";
    if (const auto* c = std::get_if<Circle>(&sc.obstacles[i])) {
      if (!(c->radius > 0)) invalid(p + ".radius_m", "must be positive");
    } else {
      const auto& w = std::get<Wall>(sc.obstacles[i]);
      if (!(w.length > 0)) invalid(p + ".length_m", "must be positive");
      if (!(w.orientation >= 0.0 && w.orientation < std::numbers::pi))
        invalid(p + ".orientation_rad", "must lie in [0, pi)");
    }
  }
  if (const auto* h = std::get_if<HomogeneousUsers>(&sc.users)) {
    if (!(h->density >= 0)) invalid("users.density_per_m2", "must be non-negative");
    if (!(h->region.radius > 0)) invalid("users.region.radius_m", "must be positive");
  } else {
    const auto& spots = std::get<HotspotUsers>(sc.users).hotspots;
    for (std::size_t i = 0; i < spots.size(); ++i) {
      const std::string p = "users.hotspots[" + std::to_string(i) + "]";
      if (!(spots[i].density >= 0)) invalid(p + ".density_per_m2", "must be non-negative");
      if (!(spots[i].region.radius > 0)) invalid(p + ".radius_m", "must be positive");
      if (distance(spots[i].region.center, sc.cell.center) + spots[i].region.radius > sc.cell.radius * (1 + 1e-12))
        invalid(p, "hotspot circle must lie inside the cell");
    }
  }
  const RfParams& rf = sc.rf;
  if (!(rf.carrier_ghz > 0)) invalid("rf.fc_ghz", "must be positive");
  if (!(rf.bandwidth_hz > 0)) invalid("rf.bandwidth_hz", "must be positive");
  if (rf.bs_antennas < 1) invalid("rf.bs_antennas", "must be at least 1");
  if (rf.ris_elements < 1) invalid("rf.ris_elements", "must be at least 1");
  if (!(rf.spacing > 0)) invalid("rf.spacing_wavelengths", "must be positive");
  const PlacementConfig& pc = sc.placement;
  if (pc.candidates < 1) invalid("placement.candidates", "must be at least 1");
  if (pc.instantiations < 1) invalid("placement.instantiations", "must be at least 1");
  if (!(pc.d_p > 0)) invalid("placement.d_p_m", "must be positive");
  if (!(pc.d_start > 0)) invalid("placement.d_start_m", "must be positive");
  if (pc.refine_radius && !(*pc.refine_radius > 0)) invalid("placement.refine_radius_m", "must be positive");
  if (!(pc.grid_resolution > 0)) invalid("placement.grid_resolution_m", "must be positive");
  const SolverConfig& cfg = sc.solver;
  if (cfg.max_iters < 1) invalid("solver.max_iters", "must be at least 1");
  if (!(cfg.rel_tol > 0)) invalid("solver.rel_tol", "must be positive");
  if (!(cfg.fixed_epsilon >= 0)) invalid("solver.fixed_epsilon", "must be non-negative");
  if (cfg.kappa0 && !(*cfg.kappa0 > 0)) invalid("solver.kappa0", "must be positive");
  if (!(cfg.backtrack_factor > 1)) invalid("solver.backtrack_factor", "must exceed 1");
}

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }

  expect_object(j, "");
  only_keys(j, "", {"name", "seed", "bs", "cell", "obstacles", "users", "rf", "placement", "solver"});
  Scenario sc;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) invalid("name", "expected a string");
    sc.name = j.at("name").get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
      invalid("seed", "expected a non-negative 64-bit integer");
    sc.seed = j.at("seed").get<std::uint64_t>();
  }
  sc.bs = point(required(j, "", "bs"), "bs");
  sc.cell = disk(required(j, "", "cell"), "cell");
  if (j.contains("obstacles")) {
    const json& arr = j.at("obstacles");
    if (!arr.is_array()) invalid("obstacles", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      sc.obstacles.push_back(obstacle(arr[i], "obstacles[" + std::to_string(i) + "]"));
  }
  sc.users = user_model(required(j, "", "users"), "users", sc.cell);
  if (j.contains("rf")) sc.rf = rf_params(j.at("rf"), "rf");
  if (j.contains("placement")) sc.placement = placement_config(j.at("placement"), "placement");
  if (j.contains("solver")) sc.solver = solver_config(j.at("solver"), "solver");
  validate(sc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string emit_scenario(const Scenario& sc) {
  ojson j;
  j["name"] = sc.name;
  j["seed"] = sc.seed;
  j["bs"] = point_json(sc.bs);
  j["cell"] = disk_json(sc.cell);
  j["obstacles"] = ojson::array();
  for (const auto& ob : sc.obstacles) {
    ojson o;
    if (const auto* c = std::get_if<Circle>(&ob)) {
      o["type"] = "circle";
      o["center"] = point_json(c->center);
      o["radius_m"] = c->radius;
    } else {
      const auto& w = std::get<Wall>(ob);
      o["type"] = "wall";
      o["center"] = point_json(w.center);
      o["length_m"] = w.length;
      o["orientation_rad"] = w.orientation;
    }
    j["obstacles"].push_back(o);
  }
  ojson u;
  if (const auto* h = std::get_if<HomogeneousUsers>(&sc.users)) {
    u["model"] = "homogeneous";
    u["density_per_m2"] = h->density;
    u["region"] = disk_json(h->region);
  } else {
    u["model"] = "hotspots";
    u["hotspots"] = ojson::array();
    for (const auto& s : std::get<HotspotUsers>(sc.users).hotspots) {
      ojson hs = disk_json(s.region);
      hs["density_per_m2"] = s.density;
      u["hotspots"].push_back(hs);
    }
  }
  j["users"] = u;
  const RfParams& rf = sc.rf;
  j["rf"] = {{"fc_ghz", rf.carrier_ghz},       {"bandwidth_hz", rf.bandwidth_hz},
             {"noise_figure_db", rf.noise_figure_db}, {"pmax_dbm", rf.pmax_dbm},
             {"t1_db", rf.t1_db},             {"t2_db", rf.t2_db},
             {"bs_antennas", rf.bs_antennas}, {"ris_elements", rf.ris_elements},
             {"spacing_wavelengths", rf.spacing}, {"array_axis_rad", rf.array_axis}};
  const PlacementConfig& pc = sc.placement;
  j["placement"] = {{"candidates", pc.candidates},
                    {"instantiations", pc.instantiations},
                    {"d_start_m", pc.d_start},
                    {"d_p_m", pc.d_p},
                    {"refine_radius_m", pc.refine_radius ? ojson(*pc.refine_radius) : ojson(nullptr)},
                    {"grid_resolution_m", pc.grid_resolution}};
  const SolverConfig& cfg = sc.solver;
  j["solver"] = {{"max_iters", cfg.max_iters},
                 {"rel_tol", cfg.rel_tol},
                 {"extrapolation", extrapolation_name(cfg.extrapolation)},
                 {"fixed_epsilon", cfg.fixed_epsilon},
                 {"kappa0", cfg.kappa0 ? ojson(*cfg.kappa0) : ojson(nullptr)},
                 {"backtrack_factor", cfg.backtrack_factor}};
  return j.dump(2) + "\n";
}

}  // namespace risplace
