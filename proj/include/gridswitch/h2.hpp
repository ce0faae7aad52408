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
#include <optional>

#include <Eigen/Dense>

#include "gridswitch/grid.hpp"
#include "gridswitch/linearization.hpp"
#include "gridswitch/power_flow.hpp"

namespace gridswitch {

/// Lambda_i / d_i over the non-reference buses.
struct DisturbanceRatios {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;

  double relative_spread() const noexcept {
    return max > 0.0 ? (max - min) / max : 0.0;
  }
};

DisturbanceRatios disturbance_ratios(const Grid& grid);

struct ClosedFormOptions {
  /// Use the mean ratio as lambda_d even when the ratios are not uniform.
  bool assume_uniform = false;
  /// Relative ratio spread still treated as uniform.
  double tolerance = 1e-9;
};

/// lambda_d of the uniform-ratio assumption; throws AssumptionViolated with
/// the measured spread unless `options.assume_uniform` is set.
double uniform_ratio(const Grid& grid, const ClosedFormOptions& options = {});

/// ||G||_H2^2 = Tr(B^T P B) with A^T P + P A + C^T C = 0.
double h2_gramian(const StateSpace& ss);

/// Generator/load partition of the reduced Laplacians and the Schur
/// complement objects built from them. Load-block matrices are indexed by
/// position in V_L; generator-block matrices by position in underline-V_SF.
struct LaplacianDecomposition {
  Eigen::MatrixXd reduced_p;  // L(G, W_p) reduced, alpha order
  Eigen::MatrixXd reduced_1;  // L(G, W_1) reduced, alpha order

  Eigen::MatrixXd L_HH, L_EH, L_EE;
  Eigen::MatrixXd L_HH_star, L_EH_star, L_EE_star;

  Eigen::MatrixXd L_load_p;  // L(G~, W~_p)
  Eigen::MatrixXd L_load_1;  // L(G~, W~_1)
  Eigen::MatrixXd Theta;
  Eigen::MatrixXd Theta_star;
  Eigen::MatrixXd L_S;       // L(G~, W~_p) + Theta
  Eigen::MatrixXd L_S_star;  // L(G~, W~_1) + Theta*
  Eigen::MatrixXd E_I;       // T_L^T E E^T T_SF

  std::size_t theta_load = 0;  // V_L position of the reference's neighbour
};

/// Throws SingularLHH when some SF bus has no active branch and
/// DisconnectedLoadGraph when the active load graph is not connected.
LaplacianDecomposition decompose_laplacians(const Grid& grid,
                                            const EquilibriumState& eq);

/// max |L_S - (L_EE - L_EH L_HH^-1 L_EH^T)|
double schur_identity_error(const LaplacianDecomposition& d);

/// max |assembled block inverse - L(G, W_p)^-1|, both built explicitly.
double block_inverse_error(const LaplacianDecomposition& d);

struct TracePi {
  double direct = 0.0;      // Tr(L(G,W_1) L(G,W_p)^-1)
  double decomposed = 0.0;  // Tr(L_S* L_S^-1) + Tr(L_HH* L_HH^-1)
  double load_term = 0.0;   // Tr(L_S* L_S^-1)
  double generator_term = 0.0;
};

TracePi trace_pi(const LaplacianDecomposition& d);
TracePi trace_pi(const Grid& grid, const EquilibriumState& eq);

/// Tr(M_SF^-1 W_2) over the non-reference SF buses.
double trace_inertia_weight(const Grid& grid);

struct H2Bounds {
  double lower = 0.0;
  double upper = 0.0;
  double lower_decomposed = 0.0;  // same bounds through Tr(L_S* L_S^-1)
  double upper_decomposed = 0.0;
};

H2Bounds h2_bounds(const Grid& grid, const EquilibriumState& eq);

/// Closed form under uniform Lambda_i/d_i.
double h2_closed_form(const Grid& grid, const EquilibriumState& eq,
                      const ClosedFormOptions& options = {});
double h2_closed_form(const Grid& grid, const LaplacianDecomposition& d,
                      double lambda_d);

enum class H2Method { Gramian, Closed, Bounds, All };

struct H2Report {
  std::optional<double> h2_squared_gramian;
  std::optional<double> h2_squared_closed;  // only when the ratios are uniform (or forced)
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  double trace_pi = 0.0;
  double trace_pi_decomposed = 0.0;
  double lambda_d_min = 0.0;
  double lambda_d_max = 0.0;
};

H2Report h2_report(const Grid& grid, const EquilibriumState& eq, H2Method method,
                   const ClosedFormOptions& options = {});

}  // namespace gridswitch
