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

#include <cmath>

#include "common.hpp"
#include "gridswitch/h2.hpp"
#include "gridswitch/synthetic.hpp"

namespace gridswitch {
namespace {

using testing::load_fixture;
using testing::max_abs;

struct Solved {
  Grid grid;
  EquilibriumState eq;
};

Solved solved(const std::string& name) {
  Grid g = load_fixture(name);
  EquilibriumState eq = solve_equilibrium(g, g.initial_on());
  return {std::move(g), std::move(eq)};
}

Grid with_buses(const Grid& g, std::vector<Bus> buses) {
  return Grid::create(std::move(buses), g.branches(), g.epsilon(), g.w1(), g.w2());
}

TEST(H2Gramian, ScalarSystem) {
  StateSpace ss;
  ss.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  ss.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
  ss.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  EXPECT_NEAR(h2_gramian(ss), 0.5, 1e-15);
  ss.B.setZero();
  EXPECT_EQ(h2_gramian(ss), 0.0);
}

TEST(H2Gramian, T3) {
  const auto [g, eq] = solved("t3.json");
  EXPECT_NEAR(h2_gramian(build_state_space(g, eq)), 1.75, 1e-12);
}

TEST(H2Gramian, WeightedFixtureMatchesOracle) {
  const auto [g, eq] = solved("t3_weighted.json");
  EXPECT_NEAR(h2_gramian(build_state_space(g, eq)), 0.6061743986728831, 1e-11);
  EXPECT_NEAR(h2_closed_form(g, eq), 0.6061743986728831, 1e-11);
}

TEST(H2Gramian, NotHurwitz) {
  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(1, 1);
  ss.B = ss.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  EXPECT_GRID_ERROR(h2_gramian(ss), ErrorKind::NotHurwitz);
}

TEST(Decomposition, T3HandValues) {
  const auto [g, eq] = solved("t3.json");
  const LaplacianDecomposition d = decompose_laplacians(g, eq);
  Eigen::Matrix2d ls, theta;
  ls << 2, -1, -1, 1;
  theta << 1, 0, 0, 0;
  EXPECT_LT(max_abs(d.L_S - ls), 1e-15);
  EXPECT_LT(max_abs(d.Theta - theta), 1e-15);
  ASSERT_EQ(d.L_HH.rows(), 1);
  EXPECT_DOUBLE_EQ(d.L_HH(0, 0), 1.0);
  EXPECT_LT(max_abs(d.L_S_star - d.L_S), 1e-15);
  EXPECT_LT(schur_identity_error(d), 1e-12);
  EXPECT_LT(block_inverse_error(d), 1e-12);
}

TEST(Decomposition, ThetaSitsAtReferenceNeighbour) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Grid g = make_synthetic_grid({.loads = 9, .generators = 3, .seed = seed});
    const EquilibriumState eq = solve_equilibrium(g, g.initial_on());
    const LaplacianDecomposition d = decompose_laplacians(g, eq);
    const std::size_t neighbour = g.index().sf_neighbor_of[0];
    const auto k = static_cast<Eigen::Index>(g.index().load_index[neighbour]);
    EXPECT_EQ(d.theta_load, static_cast<std::size_t>(k));
    EXPECT_GT(d.Theta(k, k), 0.0);
    EXPECT_EQ((d.Theta.array() != 0.0).count(), 1);
    // L_HH diagonal and positive; L_S, L_S* positive definite.
    EXPECT_EQ(max_abs(Eigen::MatrixXd(d.L_HH.diagonal().asDiagonal()) - d.L_HH), 0.0);
    EXPECT_GT(d.L_HH.diagonal().minCoeff(), 0.0);
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(d.L_S).info(), Eigen::Success);
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(d.L_S_star).info(), Eigen::Success);
    EXPECT_LT(max_abs(d.L_S - d.L_S.transpose()), 1e-14);
  }
}

TEST(Decomposition, ZeroInjectionWithMatchingWeights) {
  const Grid base = make_synthetic_grid({.loads = 7, .generators = 3, .injection_scale = 0.0, .seed = 9});
  std::vector<double> w1(base.branch_count());
  for (std::size_t e = 0; e < w1.size(); ++e) {
    w1[e] = base.bus(base.from_bus(e)).voltage * base.bus(base.to_bus(e)).voltage *
            base.branch(e).susceptance;
  }
  const Grid g = Grid::create(base.buses(), base.branches(), base.epsilon(), w1, base.w2());
  const LaplacianDecomposition d = decompose_laplacians(g, solve_equilibrium(g, g.initial_on()));
  EXPECT_LT(max_abs(d.L_S_star - d.L_S), 1e-12);
  const TracePi t = trace_pi(d);
  EXPECT_NEAR(t.direct, static_cast<double>(g.bus_count() - 1), 1e-10);
  EXPECT_NEAR(t.decomposed, static_cast<double>(g.bus_count() - 1), 1e-10);
}

TEST(Decomposition, Errors) {
  const auto [g, eq] = solved("t3.json");
  EquilibriumState no_sf = eq;
  no_sf.active.erase(2);  // g1-l2
  no_sf.wp[2] = 0.0;
  EXPECT_GRID_ERROR(decompose_laplacians(g, no_sf), ErrorKind::SingularLHH);
  EquilibriumState split = eq;
  split.active.erase(1);  // l1-l2
  split.wp[1] = 0.0;
  EXPECT_GRID_ERROR(decompose_laplacians(g, split), ErrorKind::DisconnectedLoadGraph);
}

TEST(TracePi, T3BothPaths) {
  const auto [g, eq] = solved("t3.json");
  const TracePi t = trace_pi(g, eq);
  EXPECT_NEAR(t.direct, 3.0, 1e-12);
  EXPECT_NEAR(t.decomposed, 3.0, 1e-12);
  EXPECT_NEAR(t.load_term, 2.0, 1e-12);
  EXPECT_NEAR(t.generator_term, 1.0, 1e-12);
  EXPECT_NEAR(trace_inertia_weight(g), 0.5, 1e-15);
}

TEST(TracePi, RandomEquality) {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const Grid g = make_synthetic_grid({.loads = 7, .generators = 3, .extra_lines = 4,
                                        .uniform_ratio = false, .injection_scale = 0.7,
                                        .seed = seed});
    std::vector<double> w1(g.branch_count());
    for (std::size_t e = 0; e < w1.size(); ++e) w1[e] = 0.3 + 0.2 * static_cast<double>(e % 7);
    const Grid weighted = Grid::create(g.buses(), g.branches(), g.epsilon(), w1, g.w2());
    const EquilibriumState eq = solve_equilibrium(weighted, weighted.initial_on());
    const LaplacianDecomposition d = decompose_laplacians(weighted, eq);
    const TracePi t = trace_pi(d);
    // Oracle: explicit inverse of the reduced W_p Laplacian.
    const double oracle = (d.reduced_1 * d.reduced_p.inverse()).trace();
    EXPECT_NEAR(t.direct, oracle, 1e-9 * (1.0 + std::fabs(oracle)));
    EXPECT_NEAR(t.decomposed, t.direct, 1e-9 * (1.0 + std::fabs(t.direct)));
    EXPECT_LT(block_inverse_error(d), 1e-9);
    EXPECT_LT(schur_identity_error(d), 1e-10);
  }
}

TEST(Bounds, UniformCollapse) {
  const auto [g, eq] = solved("t3.json");
  const H2Bounds b = h2_bounds(g, eq);
  EXPECT_NEAR(b.lower, 1.75, 1e-12);
  EXPECT_NEAR(b.upper, 1.75, 1e-12);
  EXPECT_NEAR(b.lower_decomposed, b.lower, 1e-12);
  EXPECT_NEAR(b.upper_decomposed, b.upper, 1e-12);
}

TEST(Bounds, HeterogeneousT3) {
  const auto [g, eq] = solved("t3_hetero.json");
  const H2Bounds b = h2_bounds(g, eq);
  const double gram = h2_gramian(build_state_space(g, eq));
  EXPECT_NEAR(b.lower, 1.75, 1e-12);
  EXPECT_NEAR(b.upper, 3.5, 1e-12);
  EXPECT_NEAR(gram, 2.3928571428571486, 1e-11);
  EXPECT_LT(b.lower, gram);
  EXPECT_LT(gram, b.upper);
}

TEST(Bounds, NoDisturbance) {
  const auto [g, eq0] = solved("t3.json");
  std::vector<Bus> buses = g.buses();
  for (Bus& b : buses) b.disturbance = 0.0;
  const Grid quiet = with_buses(g, buses);
  const H2Bounds b = h2_bounds(quiet, solve_equilibrium(quiet, quiet.initial_on()));
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_EQ(b.upper, 0.0);
}

TEST(Bounds, OrderingOnRandomHeterogeneousGrids) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const Grid g = make_synthetic_grid({.loads = 4 + seed % 10, .generators = 2 + seed % 3,
                                        .extra_lines = 3, .uniform_ratio = false,
                                        .injection_scale = 0.5, .seed = seed});
    const EquilibriumState eq = solve_equilibrium(g, g.initial_on());
    const H2Report r = h2_report(g, eq, H2Method::All);
    EXPECT_LE(*r.lower_bound, *r.h2_squared_gramian + 1e-8);
    EXPECT_LE(*r.h2_squared_gramian, *r.upper_bound + 1e-8);
    EXPECT_FALSE(r.h2_squared_closed.has_value());
    EXPECT_LE(std::fabs(r.trace_pi - r.trace_pi_decomposed), 1e-9 * (1.0 + std::fabs(r.trace_pi)));
  }
}

TEST(ClosedForm, T3) {
  const auto [g, eq] = solved("t3.json");
  EXPECT_NEAR(h2_closed_form(g, eq), 1.75, 1e-12);
}

TEST(ClosedForm, HeterogeneousRejected) {
  const auto [g, eq] = solved("t3_hetero.json");
  EXPECT_GRID_ERROR(h2_closed_form(g, eq), ErrorKind::AssumptionViolated);
  EXPECT_GRID_ERROR(h2_report(g, eq, H2Method::Closed), ErrorKind::AssumptionViolated);
  // Forced: mean ratio (1 + 1 + 2) / 3 over g1, l1, l2.
  const double forced = h2_closed_form(g, eq, {.assume_uniform = true});
  EXPECT_NEAR(forced, 1.75 * 4.0 / 3.0, 1e-12);
}

TEST(ClosedForm, LinearInLambda) {
  const auto [g, eq] = solved("t3.json");
  std::vector<Bus> buses = g.buses();
  for (Bus& b : buses) b.disturbance *= 4.0;
  const Grid scaled = with_buses(g, buses);
  EXPECT_NEAR(h2_closed_form(scaled, solve_equilibrium(scaled, scaled.initial_on())),
              4.0 * 1.75, 1e-12);
}

TEST(ClosedForm, MatchesGramianOnRandomUniformGrids) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Grid g = make_synthetic_grid({.loads = 3 + seed % 15, .generators = 2 + seed % 4,
                                        .extra_lines = seed % 5, .lambda_d = 0.5 + 0.1 * static_cast<double>(seed),
                                        .injection_scale = 0.6, .seed = seed});
    const EquilibriumState eq = solve_equilibrium(g, g.initial_on());
    const double gram = h2_gramian(build_state_space(g, eq));
    EXPECT_NEAR(h2_closed_form(g, eq), gram, 1e-8 * gram) << "seed " << seed;
  }
}

TEST(Report, MethodSelection) {
  const auto [g, eq] = solved("t3.json");
  const H2Report only_bounds = h2_report(g, eq, H2Method::Bounds);
  EXPECT_FALSE(only_bounds.h2_squared_gramian);
  EXPECT_FALSE(only_bounds.h2_squared_closed);
  EXPECT_TRUE(only_bounds.lower_bound);
  const H2Report all = h2_report(g, eq, H2Method::All);
  EXPECT_NEAR(*all.h2_squared_gramian, 1.75, 1e-12);
  EXPECT_NEAR(*all.h2_squared_closed, 1.75, 1e-12);
  EXPECT_DOUBLE_EQ(all.lambda_d_min, 1.0);
  EXPECT_DOUBLE_EQ(all.lambda_d_max, 1.0);
}

}  // namespace
}  // namespace gridswitch
