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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridswitch/grid.hpp"

namespace gridswitch {

/// Lossless steady state for one set of active branches.
struct EquilibriumState {
  EdgeSet active;
  std::vector<double> theta0;  // per bus, file order; reference = 0
  Eigen::VectorXd alpha0;      // T * theta0, alpha order
  std::vector<double> wp;      // per branch; V_i V_j b_ij cos(dtheta), 0 when off
  std::vector<double> flows;   // per branch, from -> to; 0 when off
  double slack_injection = 0.0;  // net power injected at the reference
  double residual = 0.0;         // mismatch inf-norm at the solution
  int iterations = 0;

  double wp_min() const;
};

struct PowerFlowOptions {
  int max_iterations = 50;
  int max_halvings = 20;
  double tolerance = 1e-10;
};

/// Newton-Raphson from a flat start with a backtracking line search. The
/// reference SF bus is the slack. Off branches enter with b_ij = 0.
EquilibriumState solve_equilibrium(const Grid& grid, const EdgeSet& active,
                                   const PowerFlowOptions& options = {});

/// Injection mismatch p_in,i - sum_j V_i V_j b_ij sin(theta_i - theta_j) over
/// the non-reference buses, alpha order.
Eigen::VectorXd power_mismatch(const Grid& grid, const EdgeSet& active,
                               std::span<const double> theta);

/// W_p restricted to `edges` (all must be active in `eq`).
std::vector<double> branch_weights(const Grid& grid, const EquilibriumState& eq,
                                   std::span<const std::size_t> edges);

}  // namespace gridswitch
