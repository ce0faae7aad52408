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

#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "common.hpp"
#include "gridswitch/io.hpp"
#include "gridswitch/synthetic.hpp"

namespace gridswitch {
namespace {

using testing::load_fixture;
using testing::max_abs;

TEST(LoadGrid, ParsesT3) {
  const Grid g = load_fixture("t3.json");
  EXPECT_EQ(g.bus_count(), 4u);
  EXPECT_EQ(g.branch_count(), 3u);
  EXPECT_EQ(g.bus(g.index().reference).id, "g0");
  EXPECT_EQ(g.index().reduced_dim(), 3u);
  EXPECT_EQ(g.edge_id(1), "l1-l2");
  EXPECT_EQ(g.find_branch("l2-l1"), std::optional<std::size_t>(1));
}

TEST(LoadGrid, RejectsSfSfBranch) {
  try {
    load_fixture("invalid_sf_sf.json");
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidGrid);
    EXPECT_NE(std::string(e.what()).find("E_SF must connect SF to load"), std::string::npos);
  }
}

TEST(LoadGrid, RejectsZeroSusceptance) {
  try {
    load_fixture("invalid_zero_susceptance.json");
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidGrid);
    EXPECT_NE(std::string(e.what()).find("susceptance must be positive"), std::string::npos);
  }
}

TEST(LoadGrid, MissingFileIsIoError) {
  EXPECT_GRID_ERROR(load_grid("/nonexistent/grid.json"), ErrorKind::Io);
}

TEST(LoadGrid, UnknownKeyIsSchemaError) {
  EXPECT_GRID_ERROR(parse_grid_json(R"({"buses": [], "branches": [], "bogus": 1})"),
                    ErrorKind::Schema);
}

TEST(LoadGrid, ZeroInjectionLoadGetsEpsilonDamping) {
  const Grid g = parse_grid_json(R"({
    "epsilon": 0.002,
    "buses": [
      {"id": "g", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1},
      {"id": "z", "kind": "load", "voltage": 1, "damping": 0, "p_in": 0}
    ],
    "branches": [{"from": "g", "to": "z", "susceptance": 1}]
  })");
  EXPECT_DOUBLE_EQ(g.bus(1).damping, 0.002);
}

TEST(LoadGrid, DefaultsAndWeightOverrides) {
  const Grid g = load_fixture("t3_weighted.json");
  EXPECT_DOUBLE_EQ(g.w1()[*g.find_branch("l1-l2")], 2.5);
  EXPECT_DOUBLE_EQ(g.w1()[*g.find_branch("g0-l1")], 0.6);
  EXPECT_DOUBLE_EQ(g.w1()[*g.find_branch("g1-l2")], 1.0);
  ASSERT_EQ(g.w2().size(), 1u);
  EXPECT_DOUBLE_EQ(g.w2()[0], 0.7);
}

TEST(LoadGrid, DisconnectedGridRejected) {
  EXPECT_GRID_ERROR(parse_grid_json(R"({
    "buses": [
      {"id": "g", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1},
      {"id": "a", "kind": "load", "voltage": 1, "damping": 1},
      {"id": "b", "kind": "load", "voltage": 1, "damping": 1},
      {"id": "c", "kind": "load", "voltage": 1, "damping": 1}
    ],
    "branches": [{"from": "g", "to": "a", "susceptance": 1},
                 {"from": "b", "to": "c", "susceptance": 1}]
  })"), ErrorKind::Disconnected);
}

TEST(LoadGrid, DuplicatePairRejectedInEitherOrientation) {
  EXPECT_GRID_ERROR(parse_grid_json(R"({
    "buses": [
      {"id": "g", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1},
      {"id": "a", "kind": "load", "voltage": 1, "damping": 1},
      {"id": "b", "kind": "load", "voltage": 1, "damping": 1}
    ],
    "branches": [{"from": "g", "to": "a", "susceptance": 1},
                 {"from": "a", "to": "b", "susceptance": 1},
                 {"from": "b", "to": "a", "susceptance": 2}]
  })"), ErrorKind::InvalidGrid);
}

TEST(LoadGrid, SfBusNeedsExactlyOneBranch) {
  EXPECT_GRID_ERROR(parse_grid_json(R"({
    "buses": [
      {"id": "g", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1},
      {"id": "a", "kind": "load", "voltage": 1, "damping": 1},
      {"id": "b", "kind": "load", "voltage": 1, "damping": 1}
    ],
    "branches": [{"from": "g", "to": "a", "susceptance": 1},
                 {"from": "g", "to": "b", "susceptance": 1},
                 {"from": "a", "to": "b", "susceptance": 1}]
  })"), ErrorKind::InvalidGrid);
}

TEST(LoadGrid, NoSfBusRejected) {
  EXPECT_GRID_ERROR(parse_grid_json(R"({
    "buses": [
      {"id": "a", "kind": "load", "voltage": 1, "damping": 1},
      {"id": "b", "kind": "load", "voltage": 1, "damping": 1}
    ],
    "branches": [{"from": "a", "to": "b", "susceptance": 1}]
  })"), ErrorKind::InvalidGrid);
}

// Mutations of the T3 file; each violates exactly one invariant.
class GridMutation : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(GridMutation, Rejected) {
  const std::string base = [] {
    std::ifstream in(testing::fixture("t3.json"));
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  const auto& [from, to] = GetParam();
  const auto pos = base.find(from);
  ASSERT_NE(pos, std::string::npos) << from;
  std::string mutated = base;
  mutated.replace(pos, from.size(), to);
  EXPECT_THROW(parse_grid_json(mutated), Error) << to;
}

INSTANTIATE_TEST_SUITE_P(
    Invariants, GridMutation,
    ::testing::Values(
        std::make_pair(R"("voltage": 1, "damping": 1, "inertia": 1)",
                       R"("voltage": 0, "damping": 1, "inertia": 1)"),
        std::make_pair(R"("damping": 1, "inertia": 1)", R"("damping": 0, "inertia": 1)"),
        std::make_pair(R"("inertia": 2)", R"("inertia": -2)"),
        std::make_pair(R"({"id": "l1", "kind": "load", "voltage": 1, "damping": 1,)",
                       R"({"id": "l1", "kind": "load", "voltage": 1, "damping": 1, "inertia": 1,)"),
        std::make_pair(R"("from": "l1", "to": "l2", "susceptance": 1)",
                       R"("from": "l1", "to": "l1", "susceptance": 1)"),
        std::make_pair(R"("from": "l1", "to": "l2", "susceptance": 1)",
                       R"("from": "l1", "to": "l2", "susceptance": -1)"),
        std::make_pair(R"("from": "g1", "to": "l2", "susceptance": 1, "switchable": false)",
                       R"("from": "g1", "to": "l2", "susceptance": 1, "switchable": true)"),
        std::make_pair(R"("from": "g1", "to": "l2")", R"("from": "g1", "to": "l9")"),
        std::make_pair(R"("w1": {})", R"("w1": {"l1-l2": 0})"),
        std::make_pair(R"("w2": {})", R"("w2": {"g1": -1})"),
        std::make_pair(R"("kind": "inverter")", R"("kind": "battery")")));

TEST(Incidence, TwoBusSingleEdge) {
  const Grid g = load_fixture("two_bus.json");
  const std::vector<std::size_t> edges{0};
  const Eigen::MatrixXd E = incidence_reduced(g, edges);
  ASSERT_EQ(E.rows(), 1);
  ASSERT_EQ(E.cols(), 1);
  EXPECT_EQ(E(0, 0), -1.0);
}

TEST(Incidence, T3ColumnSums) {
  const Grid g = load_fixture("t3.json");
  const std::vector<std::size_t> edges{0, 1, 2};
  const Eigen::MatrixXd E = incidence_reduced(g, edges);
  ASSERT_EQ(E.rows(), 3);
  ASSERT_EQ(E.cols(), 3);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double s = E.col(c).sum();
    EXPECT_TRUE(s == -1.0 || s == 0.0 || s == 1.0);
  }
}

TEST(Incidence, EmptyEdgeSubset) {
  const Grid g = load_fixture("t3.json");
  const Eigen::MatrixXd E = incidence_reduced(g, std::vector<std::size_t>{});
  EXPECT_EQ(E.rows(), 3);
  EXPECT_EQ(E.cols(), 0);
}

TEST(Incidence, UnknownEdge) {
  const Grid g = load_fixture("t3.json");
  EXPECT_GRID_ERROR(incidence_reduced(g, std::vector<std::size_t>{7}), ErrorKind::UnknownEdge);
}

TEST(Laplacian, Examples) {
  const WeightedGraph path2{2, {{0, 1}}};
  const std::vector<double> one{1.0}, two{2.0};
  Eigen::MatrixXd expect(2, 2);
  expect << 1, -1, -1, 1;
  EXPECT_EQ(laplacian(path2, one), expect);
  EXPECT_EQ(laplacian(path2, two), 2.0 * expect);

  const WeightedGraph k3{3, {{0, 1}, {1, 2}, {0, 2}}};
  const std::vector<double> ones(3, 1.0);
  Eigen::MatrixXd k3_expect(3, 3);
  k3_expect << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_EQ(laplacian(k3, ones), k3_expect);

  Eigen::MatrixXd k3_reduced(2, 2);
  k3_reduced << 2, -1, -1, 2;
  EXPECT_EQ(reduced_laplacian(k3, ones), k3_reduced);

  const WeightedGraph path3{3, {{0, 1}, {1, 2}}};
  Eigen::MatrixXd path_reduced(2, 2);
  path_reduced << 2, -1, -1, 1;
  EXPECT_EQ(reduced_laplacian(path3, std::vector<double>(2, 1.0)), path_reduced);
}

TEST(Laplacian, DimensionMismatch) {
  const WeightedGraph path2{2, {{0, 1}}};
  EXPECT_GRID_ERROR(laplacian(path2, std::vector<double>{1.0, 2.0}), ErrorKind::DimensionMismatch);
}

TEST(Laplacian, DisconnectedReducedIsSingular) {
  const WeightedGraph g{4, {{0, 1}, {2, 3}}};
  const Eigen::MatrixXd L = reduced_laplacian(g, std::vector<double>(2, 1.0));
  EXPECT_LT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues().minCoeff(), 1e-12);
}

// E W E^T on random graphs up to 50 nodes, plus row-sum, symmetry and
// reduced positive definiteness.
TEST(LaplacianProperty, RandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    WeightedGraph g{n, {}};
    std::vector<double> w;
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    for (std::size_t k = 1; k < n; ++k) {
      g.edges.push_back({rng() % k, k});
      w.push_back(weight(rng));
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
      const std::size_t a = rng() % n, b = rng() % n;
      if (a == b) continue;
      g.edges.push_back({a, b});
      w.push_back(weight(rng));
    }
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(g.edges.size()));
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      E(static_cast<Eigen::Index>(g.edges[e].first), static_cast<Eigen::Index>(e)) += 1.0;
      E(static_cast<Eigen::Index>(g.edges[e].second), static_cast<Eigen::Index>(e)) -= 1.0;
    }
    const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::MatrixXd L = laplacian(g, w);
    EXPECT_LT(max_abs(L - E * wv.asDiagonal() * E.transpose()), 1e-12);
    EXPECT_LT(L.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(max_abs(L - L.transpose()), 1e-12);
    const Eigen::MatrixXd Lr = reduced_laplacian(g, w);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Lr).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(GridLaplacian, MatchesIncidenceProduct) {
  const Grid g = make_synthetic_grid({.loads = 12, .generators = 4, .extra_lines = 6, .seed = 3});
  std::vector<double> w(g.branch_count());
  std::vector<std::size_t> all(g.branch_count());
  for (std::size_t e = 0; e < w.size(); ++e) {
    w[e] = 0.5 + static_cast<double>(e % 5);
    all[e] = e;
  }
  const Eigen::MatrixXd E = incidence_reduced(g, all);
  const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  EXPECT_LT(max_abs(grid_reduced_laplacian(g, w) - E * wv.asDiagonal() * E.transpose()), 1e-12);
}

TEST(GridRoundTrip, SerializeAndParse) {
  const Grid g = load_fixture("t3_weighted.json");
  const Grid again = parse_grid_json(grid_json(g).dump());
  ASSERT_EQ(again.bus_count(), g.bus_count());
  EXPECT_EQ(again.w1(), g.w1());
  EXPECT_EQ(again.w2(), g.w2());
  for (std::size_t i = 0; i < g.bus_count(); ++i) {
    EXPECT_EQ(again.bus(i).p_in, g.bus(i).p_in);
    EXPECT_EQ(again.bus(i).damping, g.bus(i).damping);
  }
}

}  // namespace
}  // namespace gridswitch
