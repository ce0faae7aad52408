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
#include <random>

#include "common.hpp"
#include "gridswitch/linearization.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/synthetic.hpp"

namespace gridswitch {
namespace {

using testing::load_fixture;
using testing::max_abs;

StateSpace t3_state_space(const std::string& name = "t3.json") {
  const Grid g = load_fixture(name);
  return build_state_space(g, solve_equilibrium(g, g.initial_on()));
}

TEST(BuildT, ThreeBuses) {
  const Grid g = parse_grid_json(R"({
    "buses": [
      {"id": "g", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1},
      {"id": "a", "kind": "load", "voltage": 1, "damping": 1},
      {"id": "b", "kind": "load", "voltage": 1, "damping": 1}
    ],
    "branches": [{"from": "g", "to": "a", "susceptance": 1},
                 {"from": "a", "to": "b", "susceptance": 1}]
  })");
  const TransformationT t = build_T(g);
  Eigen::MatrixXd expect(2, 3);
  expect << -1, 1, 0, -1, 0, 1;
  EXPECT_EQ(t.T, expect);
  EXPECT_EQ(t.T.rowwise().sum().cwiseAbs().maxCoeff(), 0.0);

  const std::vector<double> theta{0.0, 1.0, 2.0};
  EXPECT_EQ(t.apply(theta), Eigen::Vector2d(1.0, 2.0));
  const std::vector<double> shift{3.5, 3.5, 3.5};
  EXPECT_EQ(t.apply(shift), Eigen::Vector2d::Zero());
}

TEST(BuildT, ColumnsPartition) {
  const Grid g = load_fixture("t3.json");
  const TransformationT t = build_T(g);
  EXPECT_EQ(t.T_sf.cols() + t.T_l.cols() + 1, t.T.cols());
  EXPECT_EQ(t.T_sf.cols(), 1);
  EXPECT_EQ(t.T_l.cols(), 2);
}

TEST(StateSpace, TwoBus) {
  const Grid g = parse_grid_json(R"({
    "buses": [
      {"id": "g", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1, "disturbance": 1},
      {"id": "l", "kind": "load", "voltage": 1, "damping": 1, "disturbance": 1}
    ],
    "branches": [{"from": "g", "to": "l", "susceptance": 1}]
  })");
  const StateSpace ss = build_state_space(g, solve_equilibrium(g, g.initial_on()));
  ASSERT_EQ(ss.states(), 1u);
  EXPECT_DOUBLE_EQ(ss.A(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(ss.B(0, 0), 1.0);
}

TEST(StateSpace, T3MatchesOracle) {
  const StateSpace ss = t3_state_space();
  Eigen::Matrix4d expect;
  expect << 0, 0, 0, 1, 0, -2, 1, 0, 1, 1, -2, 0, -0.5, 0, 0.5, -0.5;
  ASSERT_EQ(ss.states(), 4u);
  EXPECT_LT(max_abs(ss.A - expect), 1e-14);
  EXPECT_EQ(ss.inputs(), 3u);
  EXPECT_EQ(ss.outputs(), 4u);
  EXPECT_EQ(ss.input_names.front(), "u:g1");
}

TEST(StateSpace, Structure) {
  const Grid g = make_synthetic_grid({.loads = 9, .generators = 4, .extra_lines = 3,
                                      .dispatchable = 2, .uniform_ratio = false, .seed = 11});
  const EquilibriumState eq = solve_equilibrium(g, g.initial_on());
  const StateSpace ss = build_state_space(g, eq);
  const auto na = static_cast<Eigen::Index>(ss.n_alpha);
  const auto nw = static_cast<Eigen::Index>(ss.n_omega);
  const auto nsf = static_cast<Eigen::Index>(g.index().non_reference_sf());
  ASSERT_EQ(na, static_cast<Eigen::Index>(g.bus_count() - 1));
  ASSERT_EQ(nw, nsf);
  ASSERT_EQ(ss.outputs(), g.branch_count() + g.index().non_reference_sf());

  const TransformationT t = build_T(g);
  EXPECT_EQ(ss.A.topRightCorner(na, nw), t.T_sf);
  // B: top-left and bottom-right blocks vanish; C: off-diagonal blocks vanish.
  EXPECT_EQ(max_abs(ss.B.topLeftCorner(na, nsf)), 0.0);
  EXPECT_EQ(max_abs(ss.B.bottomRightCorner(nw, ss.B.cols() - nsf)), 0.0);
  const auto ne = static_cast<Eigen::Index>(ss.n_edge_outputs);
  EXPECT_EQ(max_abs(ss.C.topRightCorner(ne, nw)), 0.0);
  EXPECT_EQ(max_abs(ss.C.bottomLeftCorner(nw, na)), 0.0);

  // An impulse on SF input k kicks omega_k by sqrt(Lambda)/m.
  for (Eigen::Index k = 0; k < nsf; ++k) {
    const Bus& b = g.bus(ss.omega_bus[static_cast<std::size_t>(k)]);
    Eigen::VectorXd col = Eigen::VectorXd::Zero(nw);
    col(k) = std::sqrt(b.disturbance) / *b.inertia;
    EXPECT_LT((ss.B.col(k).tail(nw) - col).cwiseAbs().maxCoeff(), 1e-15);
  }

  // C^T C = blockdiag(L(G, W1) reduced, W2).
  const Eigen::MatrixXd CtC = ss.C.transpose() * ss.C;
  EXPECT_LT(max_abs(CtC.topLeftCorner(na, na) - grid_reduced_laplacian(g, g.w1())), 1e-12);
  Eigen::VectorXd w2 = Eigen::Map<const Eigen::VectorXd>(g.w2().data(), nw);
  EXPECT_LT(max_abs(CtC.bottomRightCorner(nw, nw) - Eigen::MatrixXd(w2.asDiagonal())), 1e-12);
  EXPECT_LT(max_abs(CtC.topRightCorner(na, nw)), 1e-12);
}

TEST(StateSpace, NoDisturbanceMeansZeroB) {
  Grid g = load_fixture("t3.json");
  std::vector<Bus> buses = g.buses();
  for (Bus& b : buses) b.disturbance = 0.0;
  const Grid quiet = Grid::create(buses, g.branches(), g.epsilon(), g.w1(), g.w2());
  const StateSpace ss = build_state_space(quiet, solve_equilibrium(quiet, quiet.initial_on()));
  EXPECT_EQ(max_abs(ss.B), 0.0);
}

TEST(StateSpace, InsecureWeightRejected) {
  const Grid g = load_fixture("t3.json");
  EquilibriumState eq = solve_equilibrium(g, g.initial_on());
  eq.wp[1] = -0.1;
  EXPECT_GRID_ERROR(build_state_space(g, eq), ErrorKind::InsecureEquilibrium);
}

// Nonlinear swing right-hand side in (alpha, omega) coordinates with the
// reference held at its equilibrium angle.
Eigen::VectorXd vector_field(const Grid& g, const StateSpace& ss, const EquilibriumState& eq,
                             const Eigen::VectorXd& x) {
  const auto& ix = g.index();
  std::vector<double> theta(g.bus_count(), eq.theta0[ix.reference]);
  for (std::size_t k = 0; k < ix.alpha_order.size(); ++k) {
    theta[ix.alpha_order[k]] += x(static_cast<Eigen::Index>(k));
  }
  std::vector<double> net(g.bus_count(), 0.0);
  for (std::size_t e : eq.active.indices()) {
    const std::size_t f = g.from_bus(e), t = g.to_bus(e);
    const double flow = g.bus(f).voltage * g.bus(t).voltage * g.branch(e).susceptance *
                        std::sin(theta[f] - theta[t]);
    net[f] += flow;
    net[t] -= flow;
  }
  Eigen::VectorXd dx(x.size());
  std::vector<double> omega(g.bus_count(), 0.0);
  for (std::size_t k = 0; k < ss.n_omega; ++k) {
    omega[ss.omega_bus[k]] = x(static_cast<Eigen::Index>(ss.n_alpha + k));
  }
  for (std::size_t k = 0; k < ix.alpha_order.size(); ++k) {
    const std::size_t b = ix.alpha_order[k];
    const Bus& bus = g.bus(b);
    dx(static_cast<Eigen::Index>(k)) =
        bus.is_sf() ? omega[b] : (bus.p_in - net[b]) / bus.damping;
  }
  for (std::size_t k = 0; k < ss.n_omega; ++k) {
    const std::size_t b = ss.omega_bus[k];
    const Bus& bus = g.bus(b);
    dx(static_cast<Eigen::Index>(ss.n_alpha + k)) =
        (bus.p_in - net[b] - bus.damping * omega[b]) / *bus.inertia;
  }
  return dx;
}

TEST(StateSpace, MatchesNonlinearVectorField) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Grid g = make_synthetic_grid(
        {.loads = 8, .generators = 3, .extra_lines = 3, .injection_scale = 0.8, .seed = seed});
    const EquilibriumState eq = solve_equilibrium(g, g.initial_on());
    const StateSpace ss = build_state_space(g, eq);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ss.states()));
    x0.head(static_cast<Eigen::Index>(ss.n_alpha)) = eq.alpha0;
    EXPECT_LT(vector_field(g, ss, eq, x0).cwiseAbs().maxCoeff(), 1e-9);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd dx(x0.size());
      for (Eigen::Index i = 0; i < dx.size(); ++i) dx(i) = 1e-4 * normal(rng);
      const Eigen::VectorXd f = vector_field(g, ss, eq, x0 + dx);
      EXPECT_LT((f - ss.A * dx).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(Hurwitz, Examples) {
  const HurwitzResult scalar = hurwitz_check(Eigen::MatrixXd::Constant(1, 1, -1.0));
  EXPECT_TRUE(scalar.hurwitz);
  EXPECT_DOUBLE_EQ(scalar.abscissa, -1.0);

  Eigen::MatrixXd integrator(2, 2);
  integrator << 0, 1, 0, 0;
  EXPECT_FALSE(hurwitz_check(integrator).hurwitz);

  const HurwitzResult t3 = hurwitz_check(t3_state_space().A);
  EXPECT_TRUE(t3.hurwitz);
  EXPECT_NEAR(t3.abscissa, -0.27839234493424847, 1e-10);
}

}  // namespace
}  // namespace gridswitch
