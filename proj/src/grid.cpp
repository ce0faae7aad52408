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

#include "gridswitch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace gridswitch {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorKind::InvalidGrid, message);
}

bool finite(double x) { return std::isfinite(x); }

// Union-find over bus indices.
class Components {
 public:
  explicit Components(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::size_t EdgeSet::size() const noexcept {
  return static_cast<std::size_t>(
      std::count(member_.begin(), member_.end(), true));
}

std::vector<std::size_t> EdgeSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < member_.size(); ++e) {
    if (member_[e]) out.push_back(e);
  }
  return out;
}

Grid Grid::create(std::vector<Bus> buses, std::vector<Branch> branches,
                  double epsilon, std::vector<double> w1,
                  std::vector<double> w2) {
  Grid g;
  if (!(epsilon > 0.0) || !finite(epsilon)) {
    invalid("epsilon must be positive");
  }
  g.epsilon_ = epsilon;

  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    Bus& b = buses[i];
    if (b.id.empty()) invalid(fmt::format("bus #{} has an empty id", i));
    if (!by_id.emplace(b.id, i).second) {
      invalid(fmt::format("duplicate bus id '{}'", b.id));
    }
    if (!(b.voltage > 0.0) || !finite(b.voltage)) {
      invalid(fmt::format("bus '{}': voltage must be positive", b.id));
    }
    if (!finite(b.p_in)) {
      invalid(fmt::format("bus '{}': p_in must be finite", b.id));
    }
    if (!(b.disturbance >= 0.0) || !finite(b.disturbance)) {
      invalid(fmt::format("bus '{}': disturbance must be non-negative", b.id));
    }
    if (!(b.damping >= 0.0) || !finite(b.damping)) {
      invalid(fmt::format("bus '{}': damping must be non-negative", b.id));
    }
    if (b.is_sf()) {
      if (!b.inertia || !(*b.inertia > 0.0) || !finite(*b.inertia)) {
        invalid(fmt::format("bus '{}': SF bus needs positive inertia", b.id));
      }
      if (!(b.damping > 0.0)) {
        invalid(fmt::format("bus '{}': SF bus needs positive damping", b.id));
      }
    } else {
      if (b.inertia) {
        invalid(fmt::format("bus '{}': load bus must not carry inertia", b.id));
      }
      if (b.damping == 0.0) {
        if (b.p_in != 0.0) {
          invalid(fmt::format(
              "bus '{}': load with nonzero injection needs positive damping",
              b.id));
        }
        b.damping = epsilon;  // singular perturbation of a zero-injection bus
      }
    }
  }

  IndexMaps& ix = g.index_;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    (buses[i].is_sf() ? ix.sf_buses : ix.load_buses).push_back(i);
  }
  if (ix.sf_buses.empty()) invalid("at least one SF bus (the reference) is required");
  if (ix.load_buses.empty()) invalid("at least one load bus is required");
  ix.reference = ix.sf_buses.front();
  ix.alpha_order.assign(ix.sf_buses.begin() + 1, ix.sf_buses.end());
  ix.alpha_order.insert(ix.alpha_order.end(), ix.load_buses.begin(),
                        ix.load_buses.end());
  ix.alpha_index.assign(buses.size(), -1);
  for (std::size_t k = 0; k < ix.alpha_order.size(); ++k) {
    ix.alpha_index[ix.alpha_order[k]] = static_cast<std::ptrdiff_t>(k);
  }
  ix.load_index.assign(buses.size(), -1);
  for (std::size_t k = 0; k < ix.load_buses.size(); ++k) {
    ix.load_index[ix.load_buses[k]] = static_cast<std::ptrdiff_t>(k);
  }

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> sf_degree(buses.size(), 0);
  std::vector<std::size_t> sf_edge(buses.size(), 0);
  ix.load_edge_index.assign(branches.size(), -1);
  for (std::size_t e = 0; e < branches.size(); ++e) {
    const Branch& br = branches[e];
    auto f = by_id.find(br.from);
    auto t = by_id.find(br.to);
    if (f == by_id.end() || t == by_id.end()) {
      invalid(fmt::format("branch {}-{}: unknown endpoint", br.from, br.to));
    }
    if (f->second == t->second) {
      invalid(fmt::format("branch {}-{}: from and to must differ", br.from, br.to));
    }
    if (!(br.susceptance > 0.0) || !finite(br.susceptance)) {
      invalid(fmt::format("branch {}-{}: susceptance must be positive",
                          br.from, br.to));
    }
    auto key = std::minmax(f->second, t->second);
    if (!pairs.insert(key).second) {
      invalid(fmt::format("branch {}-{}: duplicate bus pair", br.from, br.to));
    }
    const bool f_sf = buses[f->second].is_sf();
    const bool t_sf = buses[t->second].is_sf();
    if (f_sf && t_sf) {
      invalid(fmt::format("branch {}-{}: E_SF must connect SF to load",
                          br.from, br.to));
    }
    if (br.switchable && (f_sf || t_sf)) {
      invalid(fmt::format(
          "branch {}-{}: switchable branches must join two load buses",
          br.from, br.to));
    }
    if (f_sf || t_sf) {
      const std::size_t s = f_sf ? f->second : t->second;
      ++sf_degree[s];
      sf_edge[s] = e;
      ix.sf_edges.push_back(e);
    } else {
      ix.load_edge_index[e] = static_cast<std::ptrdiff_t>(ix.load_edges.size());
      ix.load_edges.push_back(e);
    }
    g.endpoints_.emplace_back(f->second, t->second);
  }
  for (std::size_t s : ix.sf_buses) {
    if (sf_degree[s] != 1) {
      invalid(fmt::format(
          "bus '{}': an SF (internal) bus must have exactly one branch, found {}",
          buses[s].id, sf_degree[s]));
    }
    const std::size_t e = sf_edge[s];
    ix.sf_edge_of.push_back(e);
    const auto [a, b] = g.endpoints_[e];
    ix.sf_neighbor_of.push_back(a == s ? b : a);
  }

  if (w1.size() != branches.size()) {
    throw Error(ErrorKind::DimensionMismatch, "w1 needs one entry per branch");
  }
  if (w2.size() != ix.non_reference_sf()) {
    throw Error(ErrorKind::DimensionMismatch,
                "w2 needs one entry per non-reference SF bus");
  }
  for (std::size_t e = 0; e < w1.size(); ++e) {
    if (!(w1[e] > 0.0) || !finite(w1[e])) {
      invalid(fmt::format("w1 for branch {}-{} must be positive",
                          branches[e].from, branches[e].to));
    }
  }
  for (std::size_t k = 0; k < w2.size(); ++k) {
    if (!(w2[k] > 0.0) || !finite(w2[k])) {
      invalid(fmt::format("w2 for bus '{}' must be positive",
                          buses[ix.alpha_order[k]].id));
    }
  }

  g.buses_ = std::move(buses);
  g.branches_ = std::move(branches);
  g.w1_ = std::move(w1);
  g.w2_ = std::move(w2);
  if (!g.connected(g.all_edges())) {
    throw Error(ErrorKind::Disconnected, "grid graph is not connected");
  }
  return g;
}

std::optional<std::size_t> Grid::find_bus(std::string_view id) const {
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    if (buses_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Grid::find_branch(std::string_view edge_id) const {
  for (std::size_t e = 0; e < branches_.size(); ++e) {
    const Branch& br = branches_[e];
    if (edge_id == br.from + "-" + br.to || edge_id == br.to + "-" + br.from) {
      return e;
    }
  }
  return std::nullopt;
}

std::string Grid::edge_id(std::size_t e) const {
  const Branch& br = branches_.at(e);
  return br.from + "-" + br.to;
}

WeightedGraph Grid::augmented_graph() const {
  WeightedGraph graph;
  graph.vertices = buses_.size();
  auto vertex = [&](std::size_t bus) -> std::size_t {
    const auto k = index_.alpha_index[bus];
    return k < 0 ? 0 : static_cast<std::size_t>(k) + 1;
  };
  for (const auto& [f, t] : endpoints_) graph.edges.emplace_back(vertex(f), vertex(t));
  return graph;
}

EdgeSet Grid::initial_on() const {
  EdgeSet set(branches_.size());
  for (std::size_t e = 0; e < branches_.size(); ++e) {
    if (branches_[e].initially_on) set.insert(e);
  }
  return set;
}

EdgeSet Grid::dispatchable() const {
  EdgeSet set(branches_.size());
  for (std::size_t e = 0; e < branches_.size(); ++e) {
    if (branches_[e].switchable && !branches_[e].initially_on) set.insert(e);
  }
  return set;
}

bool Grid::connected(const EdgeSet& active) const {
  if (active.universe() != branches_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "edge set does not match grid");
  }
  Components comp(buses_.size());
  for (std::size_t e = 0; e < branches_.size(); ++e) {
    if (active.contains(e)) comp.unite(endpoints_[e].first, endpoints_[e].second);
  }
  const std::size_t root = comp.find(0);
  for (std::size_t i = 1; i < buses_.size(); ++i) {
    if (comp.find(i) != root) return false;
  }
  return true;
}

Eigen::MatrixXd incidence_reduced(const Grid& grid,
                                  std::span<const std::size_t> edges) {
  const auto& ix = grid.index();
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(ix.reduced_dim()),
      static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::size_t e = edges[k];
    if (e >= grid.branch_count()) {
      throw Error(ErrorKind::UnknownEdge, fmt::format("unknown edge #{}", e));
    }
    const auto col = static_cast<Eigen::Index>(k);
    if (const auto r = ix.alpha_index[grid.from_bus(e)]; r >= 0) E(r, col) = 1.0;
    if (const auto r = ix.alpha_index[grid.to_bus(e)]; r >= 0) E(r, col) = -1.0;
  }
  return E;
}

Eigen::MatrixXd laplacian(const WeightedGraph& graph,
                          std::span<const double> weights) {
  if (weights.size() != graph.edges.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("laplacian: {} weights for {} edges", weights.size(),
                            graph.edges.size()));
  }
  const auto n = static_cast<Eigen::Index>(graph.vertices);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(graph.edges[e].first);
    const auto j = static_cast<Eigen::Index>(graph.edges[e].second);
    if (i >= n || j >= n) {
      throw Error(ErrorKind::DimensionMismatch, "laplacian: vertex out of range");
    }
    const double w = weights[e];
    L(i, i) += w;
    L(j, j) += w;
    L(i, j) -= w;
    L(j, i) -= w;
  }
  return L;
}

Eigen::MatrixXd reduced_laplacian(const WeightedGraph& graph,
                                  std::span<const double> weights) {
  const Eigen::MatrixXd L = laplacian(graph, weights);
  const Eigen::Index n = L.rows();
  if (n == 0) return L;
  return L.bottomRightCorner(n - 1, n - 1);
}

Eigen::MatrixXd grid_reduced_laplacian(const Grid& grid,
                                       std::span<const double> weights) {
  return reduced_laplacian(grid.augmented_graph(), weights);
}

}  // namespace gridswitch
