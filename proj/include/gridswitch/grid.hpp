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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gridswitch/error.hpp"

namespace gridswitch {

enum class BusKind { Load, SyncGen, FormingInverter };

struct Bus {
  std::string id;
  BusKind kind = BusKind::Load;
  double voltage = 1.0;
  double damping = 0.0;
  std::optional<double> inertia;  // SyncGen / FormingInverter only
  double p_in = 0.0;
  double disturbance = 0.0;  // Lambda_i

  bool is_sf() const noexcept { return kind != BusKind::Load; }
};

struct Branch {
  std::string from;
  std::string to;
  double susceptance = 0.0;
  bool switchable = false;
  bool initially_on = true;
};

/// Boolean membership over the grid's branch list (file order).
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::size_t branch_count, bool value = false)
      : member_(branch_count, value) {}

  std::size_t universe() const noexcept { return member_.size(); }
  bool contains(std::size_t e) const { return member_.at(e); }
  void insert(std::size_t e) { member_.at(e) = true; }
  void erase(std::size_t e) { member_.at(e) = false; }
  std::size_t size() const noexcept;
  std::vector<std::size_t> indices() const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<bool> member_;
};

/// Plain vertex/edge description used by the generic Laplacian builders.
struct WeightedGraph {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (from, to)
};

/// Orderings shared by every matrix builder.
///
/// "alpha order" is the row order of the transformed angle vector: the
/// non-reference SF buses in file order, followed by the load buses in file
/// order. The augmented order prepends the reference bus to it.
struct IndexMaps {
  std::size_t reference = 0;                 // bus index of the angle reference
  std::vector<std::size_t> sf_buses;         // V_SF, reference first
  std::vector<std::size_t> load_buses;       // V_L
  std::vector<std::size_t> alpha_order;      // underline-V
  std::vector<std::ptrdiff_t> alpha_index;   // bus -> alpha row, -1 for reference
  std::vector<std::ptrdiff_t> load_index;    // bus -> position in V_L, -1 otherwise
  std::vector<std::size_t> sf_edges;         // E_SF, file order
  std::vector<std::size_t> load_edges;       // E_L, file order
  std::vector<std::ptrdiff_t> load_edge_index;  // branch -> position in E_L, -1 otherwise
  std::vector<std::size_t> sf_edge_of;       // per sf_buses entry: its single branch
  std::vector<std::size_t> sf_neighbor_of;   // per sf_buses entry: the adjacent load bus

  std::size_t non_reference_sf() const noexcept { return sf_buses.size() - 1; }
  std::size_t reduced_dim() const noexcept { return alpha_order.size(); }
};

class Grid {
 public:
  static constexpr double kDefaultEpsilon = 1e-3;

  /// Validates every structural invariant and returns an immutable grid.
  /// Zero-injection load buses with zero damping get damping := epsilon.
  /// `w1` is per branch; `w2` is per non-reference SF bus in alpha order.
  static Grid create(std::vector<Bus> buses, std::vector<Branch> branches,
                     double epsilon, std::vector<double> w1,
                     std::vector<double> w2);

  const std::vector<Bus>& buses() const noexcept { return buses_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  const Bus& bus(std::size_t i) const { return buses_.at(i); }
  const Branch& branch(std::size_t e) const { return branches_.at(e); }
  double epsilon() const noexcept { return epsilon_; }
  const std::vector<double>& w1() const noexcept { return w1_; }
  const std::vector<double>& w2() const noexcept { return w2_; }
  const IndexMaps& index() const noexcept { return index_; }

  std::size_t bus_count() const noexcept { return buses_.size(); }
  std::size_t branch_count() const noexcept { return branches_.size(); }
  std::size_t from_bus(std::size_t e) const { return endpoints_.at(e).first; }
  std::size_t to_bus(std::size_t e) const { return endpoints_.at(e).second; }

  std::optional<std::size_t> find_bus(std::string_view id) const;
  /// Accepts "from-to" in either orientation.
  std::optional<std::size_t> find_branch(std::string_view edge_id) const;
  std::string edge_id(std::size_t e) const;

  /// All branches as a graph over the augmented vertex order
  /// (vertex 0 = reference, vertex k = alpha_order[k-1]).
  WeightedGraph augmented_graph() const;

  /// Branches flagged initially_on.
  EdgeSet initial_on() const;
  /// Switchable branches that start switched off.
  EdgeSet dispatchable() const;
  EdgeSet all_edges() const { return EdgeSet(branches_.size(), true); }

  /// True iff the buses stay connected using only `active` branches.
  bool connected(const EdgeSet& active) const;

 private:
  Grid() = default;

  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
  double epsilon_ = kDefaultEpsilon;
  std::vector<double> w1_;
  std::vector<double> w2_;
  IndexMaps index_;
};

/// Parses and validates a grid file (JSON schema in README).
Grid load_grid(const std::filesystem::path& path);
Grid parse_grid_json(std::string_view text);

/// Incidence matrix over `edges` with the reference row deleted; rows follow
/// alpha order, column k is +1 at edges[k]'s source and -1 at its sink.
Eigen::MatrixXd incidence_reduced(const Grid& grid,
                                  std::span<const std::size_t> edges);

/// L = E W E^T for a weighted graph.
Eigen::MatrixXd laplacian(const WeightedGraph& graph,
                          std::span<const double> weights);

/// laplacian() with the first row and column deleted.
Eigen::MatrixXd reduced_laplacian(const WeightedGraph& graph,
                                  std::span<const double> weights);

/// Reduced Laplacian of the grid graph in alpha order; `weights` is per
/// branch (zero for branches that are off).
Eigen::MatrixXd grid_reduced_laplacian(const Grid& grid,
                                       std::span<const double> weights);

}  // namespace gridswitch
