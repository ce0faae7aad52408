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

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gridswitch/grid.hpp"
#include "gridswitch/io.hpp"

namespace gridswitch {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& message) {
  throw Error(ErrorKind::Schema, message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                std::string_view where) {
  if (!obj.is_object()) schema(fmt::format("{} must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      schema(fmt::format("{}: unexpected key '{}'", where, key));
    }
  }
}

double number(const json& obj, const char* key, std::string_view where,
              std::optional<double> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    schema(fmt::format("{}: missing '{}'", where, key));
  }
  if (!it->is_number()) schema(fmt::format("{}: '{}' must be a number", where, key));
  return it->get<double>();
}

bool boolean(const json& obj, const char* key, std::string_view where,
             bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) schema(fmt::format("{}: '{}' must be a boolean", where, key));
  return it->get<bool>();
}

std::string text(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    schema(fmt::format("{}: '{}' must be a string", where, key));
  }
  return it->get<std::string>();
}

BusKind parse_kind(const std::string& kind, std::string_view where) {
  if (kind == "load") return BusKind::Load;
  if (kind == "sync") return BusKind::SyncGen;
  if (kind == "inverter") return BusKind::FormingInverter;
  schema(fmt::format("{}: kind must be load|sync|inverter, got '{}'", where, kind));
}

std::string_view kind_name(BusKind kind) {
  switch (kind) {
    case BusKind::Load: return "load";
    case BusKind::SyncGen: return "sync";
    case BusKind::FormingInverter: return "inverter";
  }
  return "load";
}

}  // namespace

Grid parse_grid_json(std::string_view text_in) {
  json doc;
  try {
    doc = json::parse(text_in);
  } catch (const json::parse_error& e) {
    schema(fmt::format("grid file is not valid JSON: {}", e.what()));
  }
  check_keys(doc, {"epsilon", "buses", "branches", "weights"}, "grid");
  const double epsilon = number(doc, "epsilon", "grid", Grid::kDefaultEpsilon);

  if (!doc.contains("buses") || !doc["buses"].is_array()) {
    schema("grid: 'buses' must be an array");
  }
  if (!doc.contains("branches") || !doc["branches"].is_array()) {
    schema("grid: 'branches' must be an array");
  }

  std::vector<Bus> buses;
  for (std::size_t i = 0; i < doc["buses"].size(); ++i) {
    const json& jb = doc["buses"][i];
    const std::string where = fmt::format("buses[{}]", i);
    check_keys(jb, {"id", "kind", "voltage", "damping", "inertia", "p_in",
                    "disturbance"},
               where);
    Bus b;
    b.id = text(jb, "id", where);
    b.kind = parse_kind(text(jb, "kind", where), where);
    b.voltage = number(jb, "voltage", where);
    b.damping = number(jb, "damping", where, 0.0);
    if (jb.contains("inertia")) b.inertia = number(jb, "inertia", where);
    b.p_in = number(jb, "p_in", where, 0.0);
    b.disturbance = number(jb, "disturbance", where, 0.0);
    buses.push_back(std::move(b));
  }

  std::vector<Branch> branches;
  for (std::size_t e = 0; e < doc["branches"].size(); ++e) {
    const json& je = doc["branches"][e];
    const std::string where = fmt::format("branches[{}]", e);
    check_keys(je, {"from", "to", "susceptance", "switchable", "initially_on"},
               where);
    Branch br;
    br.from = text(je, "from", where);
    br.to = text(je, "to", where);
    br.susceptance = number(je, "susceptance", where);
    br.switchable = boolean(je, "switchable", where, false);
    br.initially_on = boolean(je, "initially_on", where, true);
    branches.push_back(std::move(br));
  }

  double w1_default = 1.0;
  double w2_default = 1.0;
  json w1_map = json::object();
  json w2_map = json::object();
  if (doc.contains("weights")) {
    const json& jw = doc["weights"];
    check_keys(jw, {"w1_default", "w2_default", "w1", "w2"}, "weights");
    w1_default = number(jw, "w1_default", "weights", 1.0);
    w2_default = number(jw, "w2_default", "weights", 1.0);
    if (jw.contains("w1")) w1_map = jw["w1"];
    if (jw.contains("w2")) w2_map = jw["w2"];
    if (!w1_map.is_object() || !w2_map.is_object()) {
      schema("weights: 'w1' and 'w2' must be objects");
    }
  }

  std::vector<double> w1(branches.size(), w1_default);
  for (const auto& [key, value] : w1_map.items()) {
    if (!value.is_number()) schema(fmt::format("weights.w1['{}'] must be a number", key));
    bool found = false;
    for (std::size_t e = 0; e < branches.size(); ++e) {
      const Branch& br = branches[e];
      if (key == br.from + "-" + br.to || key == br.to + "-" + br.from) {
        w1[e] = value.get<double>();
        found = true;
        break;
      }
    }
    if (!found) schema(fmt::format("weights.w1: unknown branch '{}'", key));
  }

  // w2 is keyed by bus id over the non-reference SF buses (alpha order).
  std::vector<std::string> sf_ids;
  for (const Bus& b : buses) {
    if (b.is_sf()) sf_ids.push_back(b.id);
  }
  std::vector<double> w2(sf_ids.empty() ? 0 : sf_ids.size() - 1, w2_default);
  for (const auto& [key, value] : w2_map.items()) {
    if (!value.is_number()) schema(fmt::format("weights.w2['{}'] must be a number", key));
    bool found = false;
    for (std::size_t k = 1; k < sf_ids.size(); ++k) {
      if (sf_ids[k] == key) {
        w2[k - 1] = value.get<double>();
        found = true;
      }
    }
    if (!found) {
      schema(fmt::format("weights.w2: '{}' is not a non-reference SF bus", key));
    }
  }

  return Grid::create(std::move(buses), std::move(branches), epsilon,
                      std::move(w1), std::move(w2));
}

Grid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, fmt::format("cannot open grid file '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_grid_json(buffer.str());
}

Json grid_json(const Grid& grid) {
  Json doc;
  doc["epsilon"] = grid.epsilon();
  Json buses = Json::array();
  for (const Bus& b : grid.buses()) {
    Json jb{{"id", b.id},
            {"kind", kind_name(b.kind)},
            {"voltage", b.voltage},
            {"damping", b.damping},
            {"p_in", b.p_in},
            {"disturbance", b.disturbance}};
    if (b.inertia) jb["inertia"] = *b.inertia;
    buses.push_back(std::move(jb));
  }
  Json branches = Json::array();
  for (const Branch& br : grid.branches()) {
    branches.push_back({{"from", br.from},
                        {"to", br.to},
                        {"susceptance", br.susceptance},
                        {"switchable", br.switchable},
                        {"initially_on", br.initially_on}});
  }
  Json w1 = Json::object();
  for (std::size_t e = 0; e < grid.branch_count(); ++e) w1[grid.edge_id(e)] = grid.w1()[e];
  Json w2 = Json::object();
  const auto& ix = grid.index();
  for (std::size_t k = 0; k < grid.w2().size(); ++k) {
    w2[grid.bus(ix.alpha_order[k]).id] = grid.w2()[k];
  }
  doc["buses"] = std::move(buses);
  doc["branches"] = std::move(branches);
  doc["weights"] = {{"w1_default", 1.0}, {"w2_default", 1.0}, {"w1", w1}, {"w2", w2}};
  return doc;
}

}  // namespace gridswitch
