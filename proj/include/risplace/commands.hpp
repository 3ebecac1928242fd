// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "risplace/placement.hpp"

namespace risplace {

struct RunContext {
  std::filesystem::path out_dir = ".";
  int threads = 1;
  std::ostream* log = nullptr;  // progress and summaries; null silences them
};

/// Floating-point field with 9 significant digits, as written to every CSV.
std::string format_number(double v);

/// "x,y" -> point. Raises ValidationError naming `what` on malformed input.
Point2 parse_point(std::string_view text, std::string_view what = "--ris");
/// "x,y;x,y;..." -> points.
std::vector<Point2> parse_points(std::string_view text, std::string_view what = "--users");
/// "a,b,c" -> numbers.
std::vector<double> parse_number_list(std::string_view text, std::string_view what = "--pmax-list");

struct BeamformRequest {
  std::optional<std::vector<Point2>> users;  // unset: one non-empty draw of the user model
  std::optional<Point2> ris;                 // unset: no RIS
};

struct BeamformReport {
  std::vector<Point2> users;
  std::vector<double> objective;  // surrogate per iteration, bits
  std::vector<double> wsr;        // per iteration
  std::vector<double> sinr;       // final, linear
  double final_wsr{};
};

/// Single-instance joint beamforming. Writes convergence.csv and sinr.csv.
BeamformReport cmd_beamform(const Scenario& sc, const BeamformRequest& req, const RunContext& ctx);

/// Full placement pipeline. Writes solutions.csv, heatmap.csv,
/// final_region.json and metrics.json.
PlacementResult cmd_place(const Scenario& sc, const RunContext& ctx);

/// Writes coverage.csv; returns the covered fraction.
CoverageMap cmd_coverage(const Scenario& sc, std::optional<Point2> ris, const RunContext& ctx);

struct SweepRow {
  double pmax_dbm{};
  std::string mode;
  double average_wsr{};
  int draws{};
};

/// Average WSR per (power, mode). `optimal_site` is required when "optimal"
/// is among the modes. Writes sweep.csv.
std::vector<SweepRow> cmd_sweep_power(const Scenario& sc, const std::vector<std::string>& modes,
                                      const std::vector<double>& pmax_dbm, std::optional<Point2> optimal_site,
                                      int draws, const RunContext& ctx);

/// Writes users.csv with `draws` consecutive non-empty or empty draws.
std::vector<std::vector<Point2>> cmd_sample_users(const Scenario& sc, int draws, const RunContext& ctx);

/// Center stored in a final_region.json.
Point2 read_final_center(const std::filesystem::path& path);

struct VerifyReport {
  bool ok{};
  std::vector<std::string> mismatches;
};

/// Recomputes final_region.json and metrics.json from solutions.csv and the
/// scenario found in `ctx.out_dir`.
VerifyReport cmd_verify(const Scenario& sc, const RunContext& ctx);

}  // namespace risplace
