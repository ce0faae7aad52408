// Copyright 2026 The gridswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridswitch/grid.hpp"
#include "gridswitch/h2.hpp"
#include "gridswitch/linearization.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/simulation.hpp"
#include "gridswitch/switching.hpp"

namespace gridswitch {

using Json = nlohmann::ordered_json;

inline constexpr int kOutputDigits = 12;

/// v rounded to `digits` significant digits (0, inf and nan pass through).
double round_significant(double v, int digits = kOutputDigits);
/// Shortest text for round_significant(v).
std::string format_number(double v);

/// Lossless re-serialization of a grid in the input schema.
Json grid_json(const Grid& grid);

/// {"theta0", "wp" (active branches), "flows", "slack_injection"}.
Json equilibrium_json(const Grid& grid, const EquilibriumState& eq);
/// Row-major A/B/C and the index maps.
Json state_space_json(const StateSpace& ss);
Json h2_report_json(const H2Report& report);
Json plan_json(const Grid& grid, const SwitchingPlan& plan);
/// iteration,line_id,sensitivity,selected,h2_squared_after
std::string trace_csv(const Grid& grid, const SwitchingPlan& plan);
/// time, then dtheta:<edge> (rad) and df:<bus> (Hz) columns.
std::string simulation_csv(const Grid& grid, const StateSpace& ss,
                           const SimulationResult& result);
Json stats_json(const Grid& grid, const StateSpace& ss, const SimulationResult& result);

/// Branch indices listed under "selected" in a plan file.
std::vector<std::size_t> read_plan(const Grid& grid, const std::filesystem::path& path);
std::vector<std::size_t> parse_plan_json(const Grid& grid, std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const Json& doc);

std::string sha256_hex(std::string_view bytes);

struct RunManifest {
  std::string command;
  Json flags = Json::object();
  std::string grid_sha256;
  std::optional<std::uint64_t> seed;
  std::string version;
  std::string isa;
  double wall_clock_seconds = 0.0;
};

Json manifest_json(const RunManifest& manifest);
/// <out>.manifest.json
std::filesystem::path manifest_path(const std::filesystem::path& output);

}  // namespace gridswitch
