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

#include "gridswitch/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace gridswitch {

double round_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  return std::stod(fmt::format("{:.{}g}", v, digits));
}

std::string format_number(double v) {
  return fmt::format("{}", round_significant(v));
}

namespace {

Json number(double v) { return round_significant(v); }

Json numbers(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(number(v));
  return arr;
}

Json matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
Json optional_number(const std::optional<T>& v) {
  return v ? number(*v) : Json(nullptr);
}

}  // namespace

Json equilibrium_json(const Grid& grid, const EquilibriumState& eq) {
  Json theta = Json::object();
  for (std::size_t i = 0; i < grid.bus_count(); ++i) theta[grid.bus(i).id] = number(eq.theta0[i]);
  Json wp = Json::object();
  Json flows = Json::object();
  for (std::size_t e : eq.active.indices()) {
    wp[grid.edge_id(e)] = number(eq.wp[e]);
    flows[grid.edge_id(e)] = number(eq.flows[e]);
  }
  Json doc;
  doc["theta0"] = std::move(theta);
  doc["wp"] = std::move(wp);
  doc["flows"] = std::move(flows);
  doc["slack_injection"] = number(eq.slack_injection);
  doc["residual"] = eq.residual;
  doc["iterations"] = eq.iterations;
  return doc;
}

Json state_space_json(const StateSpace& ss) {
  Json doc;
  doc["n"] = ss.states();
  doc["m"] = ss.inputs();
  doc["p"] = ss.outputs();
  doc["A"] = matrix(ss.A);
  doc["B"] = matrix(ss.B);
  doc["C"] = matrix(ss.C);
  doc["states"] = ss.state_names;
  doc["inputs"] = ss.input_names;
  doc["outputs"] = ss.output_names;
  return doc;
}

Json h2_report_json(const H2Report& r) {
  Json doc;
  doc["h2_squared_gramian"] = optional_number(r.h2_squared_gramian);
  doc["h2_squared_closed"] = optional_number(r.h2_squared_closed);
  doc["lower_bound"] = optional_number(r.lower_bound);
  doc["upper_bound"] = optional_number(r.upper_bound);
  doc["trace_pi"] = number(r.trace_pi);
  doc["trace_pi_decomposed"] = number(r.trace_pi_decomposed);
  doc["lambda_d_min"] = number(r.lambda_d_min);
  doc["lambda_d_max"] = number(r.lambda_d_max);
  return doc;
}

Json plan_json(const Grid& grid, const SwitchingPlan& plan) {
  Json selected = Json::array();
  for (std::size_t e : plan.selected) selected.push_back(grid.edge_id(e));
  Json iterations = Json::array();
  for (std::size_t k = 0; k < plan.iterations.size(); ++k) {
    const SwitchingIteration& it = plan.iterations[k];
    Json table = Json::object();
    for (std::size_t r = 0; r < it.sensitivities.lines.size(); ++r) {
      table[grid.edge_id(it.sensitivities.lines[r])] = number(it.sensitivities.values[r]);
    }
    Json entry;
    entry["iteration"] = k + 1;
    entry["selected"] = grid.edge_id(it.selected);
    entry["h2_squared_before"] = number(it.h2_before);
    entry["h2_squared_after"] = number(it.h2_after);
    entry["wp_min"] = number(it.equilibrium.wp_min());
    entry["sensitivities"] = std::move(table);
    iterations.push_back(std::move(entry));
  }
  Json on = Json::array();
  for (std::size_t e : plan.final_on.indices()) on.push_back(grid.edge_id(e));
  Json doc;
  doc["selected"] = std::move(selected);
  doc["h2_trajectory"] = numbers(plan.h2_trajectory);
  doc["iterations"] = std::move(iterations);
  doc["final_on"] = std::move(on);
  return doc;
}

std::string trace_csv(const Grid& grid, const SwitchingPlan& plan) {
  std::string out = "iteration,line_id,sensitivity,selected,h2_squared_after\n";
  for (std::size_t k = 0; k < plan.iterations.size(); ++k) {
    const SwitchingIteration& it = plan.iterations[k];
    for (std::size_t r = 0; r < it.sensitivities.lines.size(); ++r) {
      const std::size_t line = it.sensitivities.lines[r];
      out += fmt::format("{},{},{},{},{}\n", k + 1, grid.edge_id(line),
                         format_number(it.sensitivities.values[r]),
                         line == it.selected ? 1 : 0, format_number(it.h2_after));
    }
  }
  return out;
}

std::string simulation_csv(const Grid& grid, const StateSpace& ss,
                           const SimulationResult& result) {
  std::string out = "time";
  for (std::size_t e = 0; e < result.edge_channels; ++e) out += ",dtheta:" + grid.edge_id(e);
  for (std::size_t k = 0; k < result.frequency_channels; ++k) {
    out += ",df:" + grid.bus(ss.omega_bus[k]).id;
  }
  out += '\n';
  const std::size_t p = result.channels();
  for (std::size_t t = 0; t < result.time.size(); ++t) {
    out += format_number(result.time[t]);
    for (std::size_t j = 0; j < p; ++j) {
      out += ',';
      out += format_number(result.physical[t * p + j]);
    }
    out += '\n';
  }
  return out;
}

Json stats_json(const Grid& grid, const StateSpace& ss, const SimulationResult& result) {
  Json dtheta = Json::object();
  for (std::size_t e = 0; e < result.mean_abs_dtheta.size(); ++e) {
    dtheta[grid.edge_id(e)] = number(result.mean_abs_dtheta[e]);
  }
  Json df = Json::object();
  for (std::size_t k = 0; k < result.mean_abs_df.size(); ++k) {
    df[grid.bus(ss.omega_bus[k]).id] = number(result.mean_abs_df[k]);
  }
  Json doc;
  doc["S_average"] = number(result.s_average);
  doc["S_accumulative"] = number(result.s_accumulative);
  doc["E_abs_dtheta"] = std::move(dtheta);
  doc["E_abs_df"] = std::move(df);
  doc["horizon"] = number(result.horizon);
  return doc;
}

std::vector<std::size_t> parse_plan_json(const Grid& grid, std::string_view text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("selected") ||
      !doc["selected"].is_array()) {
    throw Error(ErrorKind::Schema, "plan file needs a \"selected\" array of line ids");
  }
  std::vector<std::size_t> lines;
  for (const auto& item : doc["selected"]) {
    if (!item.is_string()) throw Error(ErrorKind::Schema, "plan line ids must be strings");
    const auto id = item.get<std::string>();
    const auto e = grid.find_branch(id);
    if (!e) throw Error(ErrorKind::UnknownEdge, fmt::format("plan names unknown line '{}'", id));
    if (!grid.branch(*e).switchable) {
      throw Error(ErrorKind::Schema, fmt::format("plan line '{}' is not switchable", id));
    }
    lines.push_back(*e);
  }
  return lines;
}

std::vector<std::size_t> read_plan(const Grid& grid, const std::filesystem::path& path) {
  return parse_plan_json(grid, read_text(path));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::Io, fmt::format("write failed for {}", path.string()));
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::NumericalFailure, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

Json manifest_json(const RunManifest& m) {
  Json doc;
  doc["command"] = m.command;
  doc["flags"] = m.flags;
  doc["grid_sha256"] = m.grid_sha256;
  doc["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  doc["version"] = m.version;
  doc["isa"] = m.isa;
  doc["wall_clock_seconds"] = m.wall_clock_seconds;
  return doc;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

}  // namespace gridswitch
