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

#include "gridswitch/linearization.hpp"

#include <cmath>

#include <fmt/format.h>

namespace gridswitch {

Eigen::VectorXd TransformationT::apply(std::span<const double> theta) const {
  Eigen::VectorXd ordered(static_cast<Eigen::Index>(column_bus.size()));
  for (std::size_t c = 0; c < column_bus.size(); ++c) {
    ordered(static_cast<Eigen::Index>(c)) = theta[column_bus[c]];
  }
  return T * ordered;
}

TransformationT build_T(const Grid& grid) {
  const auto& ix = grid.index();
  const auto n = static_cast<Eigen::Index>(ix.reduced_dim());
  const auto n_sf = static_cast<Eigen::Index>(ix.non_reference_sf());
  TransformationT t;
  t.T.resize(n, n + 1);
  t.T.col(0).setConstant(-1.0);
  t.T.rightCols(n).setIdentity();
  t.T_sf = t.T.middleCols(1, n_sf);
  t.T_l = t.T.rightCols(n - n_sf);
  t.column_bus.push_back(ix.reference);
  t.column_bus.insert(t.column_bus.end(), ix.alpha_order.begin(), ix.alpha_order.end());
  return t;
}

StateSpace build_state_space(const Grid& grid, const EquilibriumState& eq) {
  const auto& ix = grid.index();
  for (std::size_t e = 0; e < grid.branch_count(); ++e) {
    if (eq.active.contains(e) && !(eq.wp[e] > 0.0)) {
      throw Error(ErrorKind::InsecureEquilibrium,
                  fmt::format("branch {} has non-positive weight {}",
                              grid.edge_id(e), eq.wp[e]));
    }
  }
  for (std::size_t b : ix.alpha_order) {
    if (!(grid.bus(b).damping > 0.0)) {
      throw Error(ErrorKind::NonPositiveDamping,
                  fmt::format("bus '{}' has non-positive damping", grid.bus(b).id));
    }
  }

  const TransformationT tt = build_T(grid);
  const auto nv = static_cast<Eigen::Index>(ix.reduced_dim());
  const auto ns = static_cast<Eigen::Index>(ix.non_reference_sf());
  const auto nl = nv - ns;
  const auto ne = static_cast<Eigen::Index>(grid.branch_count());

  Eigen::VectorXd d_l(nl), m_sf(ns), d_sf(ns), lam(nv);
  for (Eigen::Index k = 0; k < nv; ++k) {
    const Bus& b = grid.bus(ix.alpha_order[static_cast<std::size_t>(k)]);
    lam(k) = b.disturbance;
    if (k < ns) {
      m_sf(k) = *b.inertia;
      d_sf(k) = b.damping;
    } else {
      d_l(k - ns) = b.damping;
    }
  }

  const Eigen::MatrixXd Lp = grid_reduced_laplacian(grid, eq.wp);
  const Eigen::VectorXd d_l_inv = d_l.cwiseInverse();
  const Eigen::VectorXd m_inv = m_sf.cwiseInverse();

  StateSpace ss;
  ss.n_alpha = static_cast<std::size_t>(nv);
  ss.n_omega = static_cast<std::size_t>(ns);
  ss.n_edge_outputs = static_cast<std::size_t>(ne);
  const Eigen::Index n = nv + ns;

  ss.A = Eigen::MatrixXd::Zero(n, n);
  ss.A.topLeftCorner(nv, nv) =
      -(tt.T_l * d_l_inv.asDiagonal() * tt.T_l.transpose()) * Lp;
  ss.A.topRightCorner(nv, ns) = tt.T_sf;
  ss.A.bottomLeftCorner(ns, nv) = -(m_inv.asDiagonal() * tt.T_sf.transpose()) * Lp;
  ss.A.bottomRightCorner(ns, ns) = (-m_inv.cwiseProduct(d_sf)).asDiagonal();

  const Eigen::VectorXd sqrt_lam = lam.cwiseSqrt();
  ss.B = Eigen::MatrixXd::Zero(n, nv);
  ss.B.block(0, ns, nv, nl) = tt.T_l *
                              (d_l_inv.cwiseProduct(sqrt_lam.tail(nl))).asDiagonal();
  ss.B.block(nv, 0, ns, ns) = (m_inv.cwiseProduct(sqrt_lam.head(ns))).asDiagonal();

  std::vector<std::size_t> all(grid.branch_count());
  for (std::size_t e = 0; e < all.size(); ++e) all[e] = e;
  const Eigen::MatrixXd Ered = incidence_reduced(grid, all);
  Eigen::VectorXd sqrt_w1(ne), sqrt_w2(ns);
  for (Eigen::Index e = 0; e < ne; ++e) sqrt_w1(e) = std::sqrt(grid.w1()[static_cast<std::size_t>(e)]);
  for (Eigen::Index k = 0; k < ns; ++k) sqrt_w2(k) = std::sqrt(grid.w2()[static_cast<std::size_t>(k)]);
  ss.C = Eigen::MatrixXd::Zero(ne + ns, n);
  ss.C.topLeftCorner(ne, nv) = sqrt_w1.asDiagonal() * Ered.transpose();
  ss.C.bottomRightCorner(ns, ns) = sqrt_w2.asDiagonal();

  for (Eigen::Index k = 0; k < nv; ++k) {
    const std::size_t b = ix.alpha_order[static_cast<std::size_t>(k)];
    ss.state_names.push_back("alpha:" + grid.bus(b).id);
    ss.input_names.push_back("u:" + grid.bus(b).id);
    ss.input_bus.push_back(b);
  }
  for (Eigen::Index k = 0; k < ns; ++k) {
    const std::size_t b = ix.alpha_order[static_cast<std::size_t>(k)];
    ss.state_names.push_back("omega:" + grid.bus(b).id);
    ss.omega_bus.push_back(b);
  }
  for (std::size_t e = 0; e < grid.branch_count(); ++e) {
    ss.output_names.push_back("dtheta:" + grid.edge_id(e));
    ss.output_scale.push_back(sqrt_w1(static_cast<Eigen::Index>(e)));
  }
  for (Eigen::Index k = 0; k < ns; ++k) {
    ss.output_names.push_back("omega:" + grid.bus(ss.omega_bus[static_cast<std::size_t>(k)]).id);
    ss.output_scale.push_back(sqrt_w2(k));
  }
  return ss;
}

HurwitzResult hurwitz_check(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "hurwitz_check: A must be square");
  }
  if (A.rows() == 0) return {true, -std::numeric_limits<double>::infinity()};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "eigenvalue solver failed");
  }
  const double abscissa = solver.eigenvalues().real().maxCoeff();
  return {abscissa < kHurwitzMargin, abscissa};
}

}  // namespace gridswitch
