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

#include "gridswitch/h2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gridswitch/lyapunov.hpp"

namespace gridswitch {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& M, ErrorKind kind,
                                        const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw Error(kind, fmt::format("{} is not positive definite", what));
  }
  return llt;
}

bool load_graph_connected(const Grid& grid, const EdgeSet& active) {
  const auto& ix = grid.index();
  const std::size_t nl = ix.load_buses.size();
  std::vector<std::size_t> parent(nl);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t e : ix.load_edges) {
    if (!active.contains(e)) continue;
    const auto a = static_cast<std::size_t>(ix.load_index[grid.from_bus(e)]);
    const auto b = static_cast<std::size_t>(ix.load_index[grid.to_bus(e)]);
    parent[find(a)] = find(b);
  }
  for (std::size_t k = 1; k < nl; ++k) {
    if (find(k) != find(0)) return false;
  }
  return true;
}

}  // namespace

DisturbanceRatios disturbance_ratios(const Grid& grid) {
  DisturbanceRatios r;
  r.min = std::numeric_limits<double>::infinity();
  r.max = -std::numeric_limits<double>::infinity();
  const auto& order = grid.index().alpha_order;
  double sum = 0.0;
  for (std::size_t b : order) {
    const Bus& bus = grid.bus(b);
    if (!(bus.damping > 0.0)) {
      throw Error(ErrorKind::NonPositiveDamping,
                  fmt::format("bus '{}' has zero damping", bus.id));
    }
    const double ratio = bus.disturbance / bus.damping;
    r.min = std::min(r.min, ratio);
    r.max = std::max(r.max, ratio);
    sum += ratio;
  }
  r.mean = sum / static_cast<double>(order.size());
  return r;
}

double uniform_ratio(const Grid& grid, const ClosedFormOptions& options) {
  const DisturbanceRatios r = disturbance_ratios(grid);
  if (options.assume_uniform) return r.mean;
  if (r.relative_spread() > options.tolerance) {
    throw Error(ErrorKind::AssumptionViolated,
                fmt::format("disturbance/damping ratios are not uniform: min {:.6g}, "
                            "max {:.6g}, relative spread {:.3e}",
                            r.min, r.max, r.relative_spread()));
  }
  return r.mean;
}

double h2_gramian(const StateSpace& ss) {
  const Eigen::MatrixXd P = solve_lyapunov(ss.A, ss.C.transpose() * ss.C);
  return (ss.B.transpose() * P * ss.B).trace();
}

LaplacianDecomposition decompose_laplacians(const Grid& grid,
                                            const EquilibriumState& eq) {
  const auto& ix = grid.index();
  const auto ns = static_cast<Eigen::Index>(ix.non_reference_sf());
  const auto nv = static_cast<Eigen::Index>(ix.reduced_dim());
  const auto nl = nv - ns;

  for (std::size_t k = 0; k < ix.sf_buses.size(); ++k) {
    if (!eq.active.contains(ix.sf_edge_of[k]) || !(eq.wp[ix.sf_edge_of[k]] > 0.0)) {
      throw Error(ErrorKind::SingularLHH,
                  fmt::format("SF bus '{}' has no active branch",
                              grid.bus(ix.sf_buses[k]).id));
    }
  }
  if (!load_graph_connected(grid, eq.active)) {
    throw Error(ErrorKind::DisconnectedLoadGraph,
                "the active load graph is not connected");
  }

  LaplacianDecomposition d;
  d.reduced_p = grid_reduced_laplacian(grid, eq.wp);
  d.reduced_1 = grid_reduced_laplacian(grid, grid.w1());

  d.L_HH = d.reduced_p.topLeftCorner(ns, ns);
  d.L_EH = d.reduced_p.bottomLeftCorner(nl, ns);
  d.L_EE = d.reduced_p.bottomRightCorner(nl, nl);
  d.L_HH_star = d.reduced_1.topLeftCorner(ns, ns);
  d.L_EH_star = d.reduced_1.bottomLeftCorner(nl, ns);
  d.L_EE_star = d.reduced_1.bottomRightCorner(nl, nl);

  WeightedGraph load_graph;
  load_graph.vertices = static_cast<std::size_t>(nl);
  std::vector<double> wp_load;
  std::vector<double> w1_load;
  for (std::size_t e : ix.load_edges) {
    load_graph.edges.emplace_back(
        static_cast<std::size_t>(ix.load_index[grid.from_bus(e)]),
        static_cast<std::size_t>(ix.load_index[grid.to_bus(e)]));
    wp_load.push_back(eq.wp[e]);
    w1_load.push_back(grid.w1()[e]);
  }
  d.L_load_p = laplacian(load_graph, wp_load);
  d.L_load_1 = laplacian(load_graph, w1_load);

  const std::size_t ref_edge = ix.sf_edge_of.front();
  d.theta_load = static_cast<std::size_t>(ix.load_index[ix.sf_neighbor_of.front()]);
  const auto t = static_cast<Eigen::Index>(d.theta_load);
  d.Theta = Eigen::MatrixXd::Zero(nl, nl);
  d.Theta(t, t) = eq.wp[ref_edge];
  d.Theta_star = Eigen::MatrixXd::Zero(nl, nl);
  d.Theta_star(t, t) = grid.w1()[ref_edge];
  d.L_S = d.L_load_p + d.Theta;
  d.L_S_star = d.L_load_1 + d.Theta_star;

  const std::vector<double> unit(grid.branch_count(), 1.0);
  d.E_I = grid_reduced_laplacian(grid, unit).bottomLeftCorner(nl, ns);
  return d;
}

double schur_identity_error(const LaplacianDecomposition& d) {
  const Eigen::VectorXd hh = d.L_HH.diagonal();
  const Eigen::MatrixXd schur =
      d.L_EE - d.L_EH * hh.cwiseInverse().asDiagonal() * d.L_EH.transpose();
  return (d.L_S - schur).cwiseAbs().maxCoeff();
}

double block_inverse_error(const LaplacianDecomposition& d) {
  const Eigen::Index ns = d.L_HH.rows();
  const Eigen::Index nl = d.L_S.rows();
  const Eigen::MatrixXd S_inv = d.L_S.inverse();
  const Eigen::MatrixXd HH_inv = d.L_HH.diagonal().cwiseInverse().asDiagonal();
  Eigen::MatrixXd assembled(ns + nl, ns + nl);
  assembled.topLeftCorner(ns, ns) = HH_inv + d.E_I.transpose() * S_inv * d.E_I;
  assembled.topRightCorner(ns, nl) = -d.E_I.transpose() * S_inv;
  assembled.bottomLeftCorner(nl, ns) = -S_inv * d.E_I;
  assembled.bottomRightCorner(nl, nl) = S_inv;
  return (assembled - d.reduced_p.inverse()).cwiseAbs().maxCoeff();
}

TracePi trace_pi(const LaplacianDecomposition& d) {
  TracePi t;
  const auto full = factor_spd(d.reduced_p, ErrorKind::NumericalFailure,
                               "reduced Laplacian L(G, W_p)");
  // Tr(L1 Lp^-1) = Tr(Lp^-1 L1)
  t.direct = full.solve(d.reduced_1).trace();
  const auto ls = factor_spd(d.L_S, ErrorKind::DisconnectedLoadGraph, "L_S");
  t.load_term = ls.solve(d.L_S_star).trace();
  t.generator_term = d.L_HH_star.diagonal().cwiseQuotient(d.L_HH.diagonal()).sum();
  t.decomposed = t.load_term + t.generator_term;
  return t;
}

TracePi trace_pi(const Grid& grid, const EquilibriumState& eq) {
  return trace_pi(decompose_laplacians(grid, eq));
}

double trace_inertia_weight(const Grid& grid) {
  const auto& ix = grid.index();
  double sum = 0.0;
  for (std::size_t k = 0; k < ix.non_reference_sf(); ++k) {
    sum += grid.w2()[k] / *grid.bus(ix.alpha_order[k]).inertia;
  }
  return sum;
}

H2Bounds h2_bounds(const Grid& grid, const EquilibriumState& eq) {
  const DisturbanceRatios r = disturbance_ratios(grid);
  const TracePi t = trace_pi(grid, eq);
  const double mw = trace_inertia_weight(grid);
  H2Bounds b;
  b.lower = 0.5 * r.min * (t.direct + mw);
  b.upper = 0.5 * r.max * (t.direct + mw);
  b.lower_decomposed = 0.5 * r.min * (t.decomposed + mw);
  b.upper_decomposed = 0.5 * r.max * (t.decomposed + mw);
  return b;
}

double h2_closed_form(const Grid& grid, const LaplacianDecomposition& d,
                      double lambda_d) {
  const TracePi t = trace_pi(d);
  return 0.5 * lambda_d * (t.load_term + t.generator_term + trace_inertia_weight(grid));
}

double h2_closed_form(const Grid& grid, const EquilibriumState& eq,
                      const ClosedFormOptions& options) {
  const double lambda_d = uniform_ratio(grid, options);
  return h2_closed_form(grid, decompose_laplacians(grid, eq), lambda_d);
}

H2Report h2_report(const Grid& grid, const EquilibriumState& eq, H2Method method,
                   const ClosedFormOptions& options) {
  H2Report report;
  const DisturbanceRatios r = disturbance_ratios(grid);
  report.lambda_d_min = r.min;
  report.lambda_d_max = r.max;
  const LaplacianDecomposition d = decompose_laplacians(grid, eq);
  const TracePi t = trace_pi(d);
  report.trace_pi = t.direct;
  report.trace_pi_decomposed = t.decomposed;

  const bool all = method == H2Method::All;
  if (all || method == H2Method::Gramian) {
    report.h2_squared_gramian = h2_gramian(build_state_space(grid, eq));
  }
  if (all || method == H2Method::Bounds) {
    const double mw = trace_inertia_weight(grid);
    report.lower_bound = 0.5 * r.min * (t.direct + mw);
    report.upper_bound = 0.5 * r.max * (t.direct + mw);
  }
  if (all || method == H2Method::Closed) {
    const bool uniform = r.relative_spread() <= options.tolerance;
    if (uniform || options.assume_uniform) {
      report.h2_squared_closed = h2_closed_form(grid, d, r.mean);
    } else if (method == H2Method::Closed) {
      uniform_ratio(grid, options);  // throws AssumptionViolated
    }
  }
  return report;
}

}  // namespace gridswitch
