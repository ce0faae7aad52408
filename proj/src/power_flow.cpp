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

#include "gridswitch/power_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace gridswitch {

namespace {

std::vector<double> theta_from_alpha(const Grid& grid, const Eigen::VectorXd& alpha) {
  std::vector<double> theta(grid.bus_count(), 0.0);
  const auto& order = grid.index().alpha_order;
  for (std::size_t k = 0; k < order.size(); ++k) {
    theta[order[k]] = alpha(static_cast<Eigen::Index>(k));
  }
  return theta;
}

double coupling(const Grid& grid, std::size_t e) {
  return grid.bus(grid.from_bus(e)).voltage * grid.bus(grid.to_bus(e)).voltage *
         grid.branch(e).susceptance;
}

}  // namespace

double EquilibriumState::wp_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < wp.size(); ++e) {
    if (active.contains(e)) m = std::min(m, wp[e]);
  }
  return m;
}

Eigen::VectorXd power_mismatch(const Grid& grid, const EdgeSet& active,
                               std::span<const double> theta) {
  const auto& ix = grid.index();
  Eigen::VectorXd r(static_cast<Eigen::Index>(ix.reduced_dim()));
  for (std::size_t k = 0; k < ix.alpha_order.size(); ++k) {
    r(static_cast<Eigen::Index>(k)) = grid.bus(ix.alpha_order[k]).p_in;
  }
  for (std::size_t e = 0; e < grid.branch_count(); ++e) {
    if (!active.contains(e)) continue;
    const std::size_t f = grid.from_bus(e);
    const std::size_t t = grid.to_bus(e);
    const double flow = coupling(grid, e) * std::sin(theta[f] - theta[t]);
    if (const auto k = ix.alpha_index[f]; k >= 0) r(k) -= flow;
    if (const auto k = ix.alpha_index[t]; k >= 0) r(k) += flow;
  }
  return r;
}

EquilibriumState solve_equilibrium(const Grid& grid, const EdgeSet& active,
                                   const PowerFlowOptions& options) {
  if (active.universe() != grid.branch_count()) {
    throw Error(ErrorKind::DimensionMismatch, "edge set does not match grid");
  }
  if (!grid.connected(active)) {
    throw Error(ErrorKind::Disconnected,
                "active branches leave the grid disconnected");
  }

  const auto n = static_cast<Eigen::Index>(grid.index().reduced_dim());
  const WeightedGraph graph = grid.augmented_graph();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  std::vector<double> theta = theta_from_alpha(grid, alpha);
  Eigen::VectorXd r = power_mismatch(grid, active, theta);
  double norm = r.lpNorm<Eigen::Infinity>();

  auto jacobian = [&](const std::vector<double>& th) {
    std::vector<double> w(grid.branch_count(), 0.0);
    for (std::size_t e = 0; e < w.size(); ++e) {
      if (active.contains(e)) {
        w[e] = coupling(grid, e) *
               std::cos(th[grid.from_bus(e)] - th[grid.to_bus(e)]);
      }
    }
    return reduced_laplacian(graph, w);
  };

  int iter = 0;
  int polish = 0;
  while (true) {
    if (norm <= options.tolerance) {
      // A couple of extra quadratic steps push the residual to round-off.
      if (polish >= 2) break;
      ++polish;
    } else if (iter >= options.max_iterations) {
      throw Error(ErrorKind::NonConvergence,
                  fmt::format("power flow did not converge in {} iterations "
                              "(mismatch {:.3e})",
                              options.max_iterations, norm));
    }
    const Eigen::MatrixXd J = jacobian(theta);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const Eigen::VectorXd step = lu.solve(r);
    if (!step.allFinite() || (J * step - r).lpNorm<Eigen::Infinity>() >
                                 1e-6 * (1.0 + r.lpNorm<Eigen::Infinity>())) {
      throw Error(ErrorKind::NonConvergence, "singular power-flow Jacobian");
    }
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const Eigen::VectorXd trial = alpha + t * step;
      const std::vector<double> th = theta_from_alpha(grid, trial);
      const Eigen::VectorXd rt = power_mismatch(grid, active, th);
      const double nt = rt.lpNorm<Eigen::Infinity>();
      if (nt < norm || (norm <= options.tolerance && nt <= norm)) {
        alpha = trial;
        theta = th;
        r = rt;
        norm = nt;
        accepted = true;
        break;
      }
    }
    ++iter;
    if (!accepted) {
      if (norm <= options.tolerance) break;
      throw Error(ErrorKind::NonConvergence,
                  fmt::format("line search stalled at mismatch {:.3e}", norm));
    }
  }

  EquilibriumState eq;
  eq.active = active;
  eq.theta0 = theta;
  eq.alpha0 = alpha;
  eq.residual = norm;
  eq.iterations = iter;
  eq.wp.assign(grid.branch_count(), 0.0);
  eq.flows.assign(grid.branch_count(), 0.0);
  const std::size_t ref = grid.index().reference;
  for (std::size_t e = 0; e < grid.branch_count(); ++e) {
    if (!active.contains(e)) continue;
    const std::size_t f = grid.from_bus(e);
    const std::size_t t = grid.to_bus(e);
    const double d = theta[f] - theta[t];
    if (std::abs(d) >= std::numbers::pi / 2) {
      throw Error(ErrorKind::InsecureEquilibrium,
                  fmt::format("branch {}: angle difference {:.6f} rad is not "
                              "below pi/2",
                              grid.edge_id(e), d));
    }
    eq.wp[e] = coupling(grid, e) * std::cos(d);
    eq.flows[e] = coupling(grid, e) * std::sin(d);
    if (f == ref) eq.slack_injection += eq.flows[e];
    if (t == ref) eq.slack_injection -= eq.flows[e];
  }
  return eq;
}

std::vector<double> branch_weights(const Grid& grid, const EquilibriumState& eq,
                                   std::span<const std::size_t> edges) {
  std::vector<double> w;
  w.reserve(edges.size());
  for (std::size_t e : edges) {
    if (e >= grid.branch_count()) {
      throw Error(ErrorKind::UnknownEdge, fmt::format("unknown edge #{}", e));
    }
    if (!eq.active.contains(e)) {
      throw Error(ErrorKind::EdgeNotActive,
                  fmt::format("branch {} is switched off", grid.edge_id(e)));
    }
    w.push_back(eq.wp[e]);
  }
  return w;
}

}  // namespace gridswitch
