// SPDX-License-Identifier: Apache-2.0
// risplace: RIS placement planner.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "risplace/commands.hpp"
#include "risplace/error.hpp"
#include "risplace/parallel.hpp"
#include "risplace/scenario_io.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kGeneric = 1,
  kParse = 2,
  kValidation = 3,
  kSolver = 4,
  kVerifyMismatch = 5,
};

int exit_code(risplace::ErrorCode c) {
  using risplace::ErrorCode;
  switch (c) {
    case ErrorCode::ParseError: return kParse;
    case ErrorCode::ValidationError: return kValidation;
    case ErrorCode::VerifyMismatch: return kVerifyMismatch;
    case ErrorCode::IoError: return kGeneric;
    default: return kSolver;
  }
}

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = risplace::default_threads();
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool scenario_required = true) {
  auto* opt = cmd->add_option("--scenario", c.scenario, "Scenario JSON file");
  if (scenario_required) opt->required();
  cmd->add_option("--seed", c.seed, "Root seed, overriding the scenario's");
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("-q,--quiet", c.quiet, "Suppress progress output");
}

risplace::Scenario load(const Common& c, std::optional<int> max_iters = {}) {
  risplace::Scenario sc = risplace::load_scenario(c.scenario);
  if (c.seed) sc.seed = *c.seed;
  if (max_iters) sc.solver.max_iters = *max_iters;
  risplace::validate(sc);
  return sc;
}

risplace::RunContext context(const Common& c) {
  risplace::RunContext ctx;
  ctx.out_dir = c.out;
  ctx.threads = c.threads;
  ctx.log = c.quiet ? nullptr : &std::cout;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal RIS placement for multi-user MISO cells with random users"};
  app.require_subcommand(1);

  Common common;
  std::optional<int> max_iters;
  std::string ris;
  std::string users;
  std::string pmax_list = "-10,-5,0,5,10,15,20";
  std::string modes;
  std::string placement;
  std::optional<int> draws;
  int user_draws = 1;

  auto* beamform = app.add_subcommand("beamform", "Joint beamforming for one user draw");
  add_common(beamform, common);
  beamform->add_option("--ris", ris, "RIS site x,y (default: no RIS)");
  beamform->add_option("--users", users, "User positions x,y;x,y;... (default: one draw of the user model)");
  beamform->add_option("--max-iters", max_iters, "Solver iteration cap")->check(CLI::PositiveNumber);

  auto* place = app.add_subcommand("place", "Recursive placement search");
  add_common(place, common);
  place->add_option("--max-iters", max_iters, "Solver iteration cap")->check(CLI::PositiveNumber);

  auto* cover = app.add_subcommand("coverage", "LOS coverage map");
  add_common(cover, common);
  cover->add_option("--ris", ris, "RIS site x,y (default: no RIS)");

  auto* sweep = app.add_subcommand("sweep-power", "Average WSR against transmit power");
  add_common(sweep, common);
  sweep->add_option("--pmax-list", pmax_list, "Comma-separated transmit powers in dBm")->capture_default_str();
  sweep->add_option("--mode", modes,
                   "Comma-separated modes among optimal, random, none (default: none,random plus optimal "
                   "when a site is given)");
  sweep->add_option("--placement", placement, "final_region.json of a placement run (optimal mode)");
  sweep->add_option("--ris", ris, "RIS site x,y for the optimal mode, instead of --placement");
  sweep->add_option("--draws", draws, "User draws per point (default: placement.instantiations)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--max-iters", max_iters, "Solver iteration cap")->check(CLI::PositiveNumber);

  auto* sample = app.add_subcommand("sample-users", "Draw users from the scenario's model");
  add_common(sample, common);
  sample->add_option("--draws", user_draws, "Number of draws")->check(CLI::PositiveNumber)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Recompute a placement run's outputs and compare");
  add_common(verify, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage mistakes count as invalid input; --help still exits 0.
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (verify->parsed() && common.scenario.empty())
      common.scenario = (std::filesystem::path(common.out) / "scenario.json").string();
    const risplace::RunContext ctx = context(common);

    if (beamform->parsed()) {
      risplace::BeamformRequest req;
      if (!ris.empty()) req.ris = risplace::parse_point(ris, "--ris");
      if (!users.empty()) req.users = risplace::parse_points(users, "--users");
      risplace::cmd_beamform(load(common, max_iters), req, ctx);
    } else if (place->parsed()) {
      risplace::cmd_place(load(common, max_iters), ctx);
    } else if (cover->parsed()) {
      std::optional<risplace::Point2> site;
      if (!ris.empty()) site = risplace::parse_point(ris, "--ris");
      risplace::cmd_coverage(load(common), site, ctx);
    } else if (sweep->parsed()) {
      const auto sc = load(common, max_iters);
      std::optional<risplace::Point2> site;
      if (!ris.empty()) site = risplace::parse_point(ris, "--ris");
      else if (!placement.empty()) site = risplace::read_final_center(placement);
      if (modes.empty()) modes = site ? "none,random,optimal" : "none,random";
      std::vector<std::string> mode_list;
      std::stringstream ss(modes);
      for (std::string m; std::getline(ss, m, ',');)
        if (!m.empty()) mode_list.push_back(m);
      risplace::cmd_sweep_power(sc, mode_list, risplace::parse_number_list(pmax_list, "--pmax-list"), site,
                                draws.value_or(sc.placement.instantiations), ctx);
    } else if (sample->parsed()) {
      risplace::cmd_sample_users(load(common), user_draws, ctx);
    } else if (verify->parsed()) {
      const auto rep = risplace::cmd_verify(load(common), ctx);
      if (!rep.ok) {
        for (const auto& m : rep.mismatches) std::cerr << "risplace: " << m << '\n';
        return kVerifyMismatch;
      }
    }
  } catch (const risplace::Error& e) {
    std::cerr << "risplace: " << risplace::to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "risplace: " << e.what() << '\n';
    return kGeneric;
  }
  return kOk;
}
