// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "risplace/beamform.hpp"
#include "risplace/channel.hpp"
#include "risplace/error.hpp"
#include "risplace/geom.hpp"
#include "risplace/placement.hpp"
#include "risplace/rng.hpp"
#include "risplace/scenario_io.hpp"

namespace py = pybind11;
using namespace risplace;

namespace {

std::vector<Point2> to_points(const std::vector<std::pair<double, double>>& xy) {
  std::vector<Point2> out;
  out.reserve(xy.size());
  for (auto [x, y] : xy) out.push_back({x, y});
  return out;
}

std::pair<double, double> to_pair(Point2 p) { return {p.x, p.y}; }

std::optional<Point2> to_site(const std::optional<std::pair<double, double>>& xy) {
  if (!xy) return std::nullopt;
  return Point2{xy->first, xy->second};
}

}  // namespace

PYBIND11_MODULE(_risplace, m) {
  m.doc() = "RIS placement planner: channels, joint beamforming and placement search.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("name", [](const Scenario& s) { return s.name; })
      .def_property("seed", [](const Scenario& s) { return s.seed; },
                    [](Scenario& s, std::uint64_t v) { s.seed = v; })
      .def_property_readonly("bs", [](const Scenario& s) { return to_pair(s.bs); })
      .def_property_readonly("cell_center", [](const Scenario& s) { return to_pair(s.cell.center); })
      .def_property_readonly("cell_radius", [](const Scenario& s) { return s.cell.radius; })
      .def_property_readonly("obstacle_count", [](const Scenario& s) { return s.obstacles.size(); })
      .def_property("pmax_dbm", [](const Scenario& s) { return s.rf.pmax_dbm; },
                    [](Scenario& s, double v) { s.rf.pmax_dbm = v; })
      .def_property("candidates", [](const Scenario& s) { return s.placement.candidates; },
                    [](Scenario& s, int v) { s.placement.candidates = v; })
      .def_property("instantiations", [](const Scenario& s) { return s.placement.instantiations; },
                    [](Scenario& s, int v) { s.placement.instantiations = v; })
      .def_property("max_iters", [](const Scenario& s) { return s.solver.max_iters; },
                    [](Scenario& s, int v) { s.solver.max_iters = v; })
      .def("to_json", &emit_scenario)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
  m.def("load_scenario", [](const std::string& path) { return load_scenario(path); }, py::arg("path"));

  m.def("pathloss_direct", &pathloss_direct, py::arg("distance_m"), py::arg("carrier_ghz"));
  m.def("pathloss_ris_leg", &pathloss_ris_leg, py::arg("distance_m"), py::arg("carrier_ghz"));
  m.def("noise_power_dbm", &noise_power_dbm, py::arg("bandwidth_hz"), py::arg("noise_figure_db"));
  m.def("steering_vector", &steering_vector, py::arg("n"), py::arg("angle"), py::arg("spacing") = 0.5);

  m.def(
      "segment_blocked",
      [](const Scenario& sc, std::pair<double, double> a, std::pair<double, double> b) {
        return segment_blocked({a.first, a.second}, {b.first, b.second}, sc.obstacles);
      },
      py::arg("scenario"), py::arg("a"), py::arg("b"));

  m.def(
      "coverage",
      [](const Scenario& sc, std::optional<std::pair<double, double>> ris, std::optional<double> resolution) {
        return coverage(sc.cell, sc.bs, sc.obstacles, to_site(ris),
                        resolution.value_or(sc.placement.grid_resolution))
            .fraction;
      },
      py::arg("scenario"), py::arg("ris") = py::none(), py::arg("resolution") = py::none(),
      "Fraction of non-obstacle grid points with LOS to the BS, directly or via the RIS.");

  m.def(
      "sample_users",
      [](const Scenario& sc, std::uint64_t seed) {
        std::vector<std::pair<double, double>> out;
        for (Point2 p : sample_users(sc.users, sc.cell, sc.obstacles, seed)) out.push_back(to_pair(p));
        return out;
      },
      py::arg("scenario"), py::arg("seed"));

  m.def(
      "channels",
      [](const Scenario& sc, const std::vector<std::pair<double, double>>& users,
         std::optional<std::pair<double, double>> ris, std::uint64_t seed) {
        const auto pts = to_points(users);
        const ChannelSeeds seeds{derive_seed(seed, Stream::DirectLink, {0}),
                                 derive_seed(seed, Stream::BsRisLink, {0, 0})};
        const ChannelSet cs = sample_channels(sc.bs, sc.obstacles, sc.rf, to_site(ris), pts, seeds);
        py::dict d;
        d["h_bu"] = cs.h_bu;
        d["h_br"] = cs.h_br;
        d["h_ru"] = cs.h_ru;
        d["noise_mw"] = sc.rf.noise_mw();
        d["pmax_mw"] = sc.rf.pmax_mw();
        return d;
      },
      py::arg("scenario"), py::arg("users"), py::arg("ris") = py::none(), py::arg("seed") = 1,
      "Channel draw used by beamform() for the same arguments.");

  m.def(
      "beamform",
      [](const Scenario& sc, const std::vector<std::pair<double, double>>& users,
         std::optional<std::pair<double, double>> ris, std::uint64_t seed) {
        const auto pts = to_points(users);
        const ChannelSeeds seeds{derive_seed(seed, Stream::DirectLink, {0}),
                                 derive_seed(seed, Stream::BsRisLink, {0, 0})};
        const ChannelSet cs = sample_channels(sc.bs, sc.obstacles, sc.rf, to_site(ris), pts, seeds);
        const double noise = sc.rf.noise_mw();
        FpState s;
        {
          py::gil_scoped_release release;
          s = solve(cs, sc.rf.pmax_mw(), noise, sc.solver);
        }
        py::dict d;
        d["W"] = s.W;
        d["phases"] = s.phases;
        d["objective"] = s.objective_history;
        d["wsr_history"] = s.wsr_history;
        d["wsr"] = wsr(cs, s.W, s.theta(), noise);
        d["sinr"] = sinrs(cs, s.W, s.theta(), noise);
        d["iterations"] = s.iteration;
        return d;
      },
      py::arg("scenario"), py::arg("users"), py::arg("ris") = py::none(), py::arg("seed") = 1,
      "Joint beamforming for one channel draw; returns W, phases, histories and SINRs.");

  m.def(
      "place",
      [](const Scenario& sc, int threads) {
        PlacementResult r;
        {
          py::gil_scoped_release release;
          r = place(sc, threads);
        }
        py::list trace;
        for (const auto& t : r.trace) {
          py::dict d;
          d["level"] = t.level;
          d["step"] = t.step;
          d["mode"] = to_pair(t.mode);
          d["circle_center"] = to_pair(t.circle.center);
          d["circle_radius"] = t.circle.radius;
          py::list heat;
          for (const auto& h : t.heat) heat.append(py::make_tuple(h.cell.x, h.cell.y, h.count));
          d["heat"] = heat;
          trace.append(d);
        }
        py::dict d;
        d["center"] = to_pair(r.center);
        d["side"] = r.side;
        d["trace"] = trace;
        d["coverage_without"] = r.metrics.coverage_without;
        d["coverage_with"] = r.metrics.coverage_with;
        d["average_wsr"] = r.metrics.average_wsr;
        d["average_wsr_without"] = r.metrics.average_wsr_without;
        return d;
      },
      py::arg("scenario"), py::arg("threads") = 1, "Full recursive placement search.");

  m.def(
      "average_wsr",
      [](const Scenario& sc, const std::string& mode, std::optional<std::pair<double, double>> site, int draws,
         std::uint64_t seed, int threads) {
        SiteMode sm;
        if (mode == "optimal" || mode == "fixed") sm = SiteMode::Fixed;
        else if (mode == "random") sm = SiteMode::Random;
        else if (mode == "none") sm = SiteMode::None;
        else throw Error(ErrorCode::ValidationError, "unknown mode '" + mode + "'", "mode");
        if (sm == SiteMode::Fixed && !site) throw Error(ErrorCode::ValidationError, "fixed mode needs a site", "site");
        py::gil_scoped_release release;
        return average_wsr(sc, sm, to_site(site), draws, seed, threads);
      },
      py::arg("scenario"), py::arg("mode"), py::arg("site") = py::none(), py::arg("draws") = 10,
      py::arg("seed") = 1, py::arg("threads") = 1);
}
