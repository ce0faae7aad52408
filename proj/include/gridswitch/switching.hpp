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

#include "gridswitch/grid.hpp"
#include "gridswitch/h2.hpp"
#include "gridswitch/power_flow.hpp"

namespace gridswitch {

struct SwitchingOptions {
  ClosedFormOptions closed_form;
  unsigned threads = 1;
};

/// d||G||^2 / d b_ij with the equilibrium angles held fixed:
///   -(lambda_d / 2) Tr(L_S^-1 L_S* L_S^-1 L(G~, W~_p E^ij)).
/// For a switched-off line, L_S is the current (line-off) matrix and
/// W~_p E^ij carries V_i V_j cos(theta_i - theta_j) at the current angles.
double sensitivity(const Grid& grid, const EquilibriumState& eq,
                   const LaplacianDecomposition& decomp, std::size_t line,
                   const SwitchingOptions& options = {});

/// Central difference of the closed form in b_ij, angles held fixed, with
/// step relative_step * b_ij. Off lines are differenced around b_ij = 0.
double sensitivity_finite_difference(const Grid& grid, const EquilibriumState& eq,
                                     std::size_t line, double relative_step = 1e-6,
                                     const SwitchingOptions& options = {});

struct SensitivityTable {
  std::vector<std::size_t> lines;
  std::vector<double> values;
};

/// Batched sensitivity() sharing one factorization of L_S.
SensitivityTable sensitivities_all(const Grid& grid, const EquilibriumState& eq,
                                   const LaplacianDecomposition& decomp,
                                   std::span<const std::size_t> candidates,
                                   const SwitchingOptions& options = {});

struct SwitchingIteration {
  EquilibriumState equilibrium;       // power flow used for this iteration
  double h2_before = 0.0;
  SensitivityTable sensitivities;     // candidates and already-on dispatchable lines
  std::vector<bool> candidate;        // per table row: still off at this iteration
  std::size_t selected = 0;           // branch index switched on
  double h2_after = 0.0;
};

struct SwitchingPlan {
  std::vector<std::size_t> selected;
  std::vector<SwitchingIteration> iterations;
  std::vector<double> h2_trajectory;  // baseline, then after each switch-on
  EquilibriumState final_equilibrium;
  EdgeSet final_on;
};

/// Greedy switch-on loop: each iteration re-solves the power flow for the
/// current on-set, evaluates every remaining candidate and switches on the
/// one with the most negative sensitivity (ties go to the earliest branch).
SwitchingPlan greedy_switch(const Grid& grid, const EdgeSet& dispatchable,
                            std::size_t n_on, const SwitchingOptions& options = {});

}  // namespace gridswitch
