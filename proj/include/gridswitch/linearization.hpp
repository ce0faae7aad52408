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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridswitch/grid.hpp"
#include "gridswitch/power_flow.hpp"

namespace gridswitch {

/// alpha = T theta with T = row(-1, I). Columns follow the augmented order
/// (reference first, then alpha order); `column_bus` maps them to buses.
struct TransformationT {
  Eigen::MatrixXd T;
  Eigen::MatrixXd T_sf;  // columns of underline-V_SF
  Eigen::MatrixXd T_l;   // columns of V_L
  std::vector<std::size_t> column_bus;

  /// theta given per bus in file order.
  Eigen::VectorXd apply(std::span<const double> theta) const;
};

TransformationT build_T(const Grid& grid);

/// Linearization around an equilibrium.
///
/// States are col(alpha, underline-omega_SF); inputs are col(u over
/// underline-V_SF, u over V_L); outputs are one weighted angle difference per
/// branch (all branches, file order) followed by the weighted SF frequencies.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;

  std::size_t n_alpha = 0;
  std::size_t n_omega = 0;
  std::size_t n_edge_outputs = 0;

  std::vector<std::string> state_names;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::vector<std::size_t> input_bus;   // bus index per input
  std::vector<std::size_t> omega_bus;   // bus index per omega state / frequency output
  std::vector<double> output_scale;     // sqrt(W1) per edge, sqrt(W2) per SF bus

  std::size_t states() const noexcept { return static_cast<std::size_t>(A.rows()); }
  std::size_t inputs() const noexcept { return static_cast<std::size_t>(B.cols()); }
  std::size_t outputs() const noexcept { return static_cast<std::size_t>(C.rows()); }
};

/// Assembles (A, B, C) for the active branch set of `eq`.
StateSpace build_state_space(const Grid& grid, const EquilibriumState& eq);

struct HurwitzResult {
  bool hurwitz = false;
  double abscissa = 0.0;  // max real part of the spectrum
};

inline constexpr double kHurwitzMargin = -1e-9;

HurwitzResult hurwitz_check(const Eigen::MatrixXd& A);

}  // namespace gridswitch
