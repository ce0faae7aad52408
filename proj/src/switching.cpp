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

#include "gridswitch/switching.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include <fmt/format.h>

namespace gridswitch {

namespace {

constexpr double kTieTolerance = 1e-12;

// X = L_S^-1 L_S* L_S^-1 together with lambda_d; everything a sensitivity
// evaluation needs besides the line itself.
struct SensitivityKernel {
  Eigen::MatrixXd X;
  double lambda_d = 0.0;

  SensitivityKernel(const Grid& grid, const LaplacianDecomposition& d,
                    const ClosedFormOptions& options)
      : lambda_d(uniform_ratio(grid, options)) {
    Eigen::LLT<Eigen::MatrixXd> llt(d.L_S);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::DisconnectedLoadGraph, "L_S is not positive definite");
    }
    const Eigen::MatrixXd left = llt.solve(d.L_S_star);  // L_S^-1 L_S*
    X = llt.solve(left.transpose());
    X = 0.5 * (X + X.transpose());
  }

  double evaluate(const Grid& grid, const EquilibriumState& eq,
                  std::size_t line) const {
    const auto& ix = grid.index();
    if (line >= grid.branch_count()) {
      throw Error(ErrorKind::UnknownEdge, fmt::format("unknown edge #{}", line));
    }
    if (ix.load_edge_index[line] < 0) {
      throw Error(ErrorKind::UnknownEdge,
                  fmt::format("branch {} is not a load-load line", grid.edge_id(line)));
    }
    const std::size_t f = grid.from_bus(line);
    const std::size_t t = grid.to_bus(line);
    // W~_p E^ij: V_i V_j b_ij cos(dtheta) / b_ij
    const double c = grid.bus(f).voltage * grid.bus(t).voltage *
                      std::cos(eq.theta0[f] - eq.theta0[t]);
    const auto a = ix.load_index[f];
    const auto b = ix.load_index[t];
    const double quad = X(a, a) + X(b, b) - 2.0 * X(a, b);
    return -0.5 * lambda_d * c * quad;
  }
};

}  // namespace

double sensitivity(const Grid& grid, const EquilibriumState& eq,
                   const LaplacianDecomposition& decomp, std::size_t line,
                   const SwitchingOptions& options) {
  const SensitivityKernel kernel(grid, decomp, options.closed_form);
  return kernel.evaluate(grid, eq, line);
}

double sensitivity_finite_difference(const Grid& grid, const EquilibriumState& eq,
                                     std::size_t line, double relative_step,
                                     const SwitchingOptions& options) {
  if (line >= grid.branch_count() || grid.index().load_edge_index[line] < 0) {
    throw Error(ErrorKind::UnknownEdge, "finite difference needs a load-load line");
  }
  const double lambda_d = uniform_ratio(grid, options.closed_form);
  const std::size_t f = grid.from_bus(line);
  const std::size_t t = grid.to_bus(line);
  const double b = grid.branch(line).susceptance;
  const double c = grid.bus(f).voltage * grid.bus(t).voltage *
                   std::cos(eq.theta0[f] - eq.theta0[t]);
  const double b0 = eq.active.contains(line) ? b : 0.0;
  const double h = relative_step * b;
  auto at = [&](double susceptance) {
    EquilibriumState shifted = eq;
    shifted.wp[line] = c * susceptance;
    return h2_closed_form(grid, decompose_laplacians(grid, shifted), lambda_d);
  };
  return (at(b0 + h) - at(b0 - h)) / (2.0 * h);
}

SensitivityTable sensitivities_all(const Grid& grid, const EquilibriumState& eq,
                                   const LaplacianDecomposition& decomp,
                                   std::span<const std::size_t> candidates,
                                   const SwitchingOptions& options) {
  SensitivityTable table;
  table.lines.assign(candidates.begin(), candidates.end());
  table.values.assign(candidates.size(), 0.0);
  if (candidates.empty()) return table;

  const SensitivityKernel kernel(grid, decomp, options.closed_form);
  const std::size_t workers =
      std::clamp<std::size_t>(options.threads, 1, candidates.size());
  if (workers == 1) {
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      table.values[k] = kernel.evaluate(grid, eq, candidates[k]);
    }
    return table;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (candidates.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          const std::size_t end = std::min(candidates.size(), (w + 1) * chunk);
          for (std::size_t k = w * chunk; k < end; ++k) {
            table.values[k] = kernel.evaluate(grid, eq, candidates[k]);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return table;
}

SwitchingPlan greedy_switch(const Grid& grid, const EdgeSet& dispatchable,
                            std::size_t n_on, const SwitchingOptions& options) {
  if (dispatchable.universe() != grid.branch_count()) {
    throw Error(ErrorKind::DimensionMismatch, "dispatchable set does not match grid");
  }
  const std::vector<std::size_t> pool = dispatchable.indices();
  for (std::size_t e : pool) {
    if (!grid.branch(e).switchable) {
      throw Error(ErrorKind::InvalidGrid,
                  fmt::format("branch {} is not switchable", grid.edge_id(e)));
    }
  }
  if (n_on > 0 && pool.empty()) {
    throw Error(ErrorKind::EmptyCandidates, "no dispatchable lines to switch on");
  }

  EdgeSet on = grid.initial_on();
  for (std::size_t e : pool) on.erase(e);
  const double lambda_d = uniform_ratio(grid, options.closed_form);

  SwitchingPlan plan;
  EquilibriumState eq = solve_equilibrium(grid, on);
  double h2 = h2_closed_form(grid, decompose_laplacians(grid, eq), lambda_d);
  plan.h2_trajectory.push_back(h2);

  while (plan.selected.size() < n_on) {
    std::vector<bool> is_candidate;
    for (std::size_t e : pool) is_candidate.push_back(!on.contains(e));
    if (std::none_of(is_candidate.begin(), is_candidate.end(), [](bool b) { return b; })) {
      break;
    }
    SwitchingIteration it;
    it.h2_before = h2;
    const LaplacianDecomposition d = decompose_laplacians(grid, eq);
    it.sensitivities = sensitivities_all(grid, eq, d, pool, options);
    it.candidate = is_candidate;

    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (!is_candidate[k]) continue;
      // Values within rounding of the incumbent count as ties; file order wins.
      const double v = it.sensitivities.values[k];
      if (!best) {
        best = k;
      } else {
        const double incumbent = it.sensitivities.values[*best];
        if (v < incumbent - kTieTolerance * std::fabs(incumbent)) best = k;
      }
    }
    it.selected = pool[*best];
    on.insert(it.selected);
    plan.selected.push_back(it.selected);
    it.equilibrium = std::move(eq);

    eq = solve_equilibrium(grid, on);
    h2 = h2_closed_form(grid, decompose_laplacians(grid, eq), lambda_d);
    it.h2_after = h2;
    plan.h2_trajectory.push_back(h2);
    plan.iterations.push_back(std::move(it));
  }
  plan.final_equilibrium = std::move(eq);
  plan.final_on = on;
  return plan;
}

}  // namespace gridswitch
