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

#include "gridswitch/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "gridswitch/grid.hpp"
#include "gridswitch/h2.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/switching.hpp"
#include "gridswitch/synthetic.hpp"

namespace gridswitch {

namespace {

constexpr std::string_view kT3 = R"({
  "epsilon": 0.001,
  "buses": [
    {"id": "g0", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1, "p_in": 0, "disturbance": 1},
    {"id": "l1", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 1},
    {"id": "l2", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 1},
    {"id": "g1", "kind": "inverter", "voltage": 1, "damping": 1, "inertia": 2, "p_in": 0, "disturbance": 1}
  ],
  "branches": [
    {"from": "g0", "to": "l1", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "l1", "to": "l2", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "g1", "to": "l2", "susceptance": 1, "switchable": false, "initially_on": true}
  ],
  "weights": {"w1_default": 1, "w2_default": 1, "w1": {}, "w2": {}}
})";

constexpr std::string_view kT3Heterogeneous = R"({
  "epsilon": 0.001,
  "buses": [
    {"id": "g0", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1, "p_in": 0, "disturbance": 1},
    {"id": "l1", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 1},
    {"id": "l2", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 2},
    {"id": "g1", "kind": "inverter", "voltage": 1, "damping": 1, "inertia": 2, "p_in": 0, "disturbance": 1}
  ],
  "branches": [
    {"from": "g0", "to": "l1", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "l1", "to": "l2", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "g1", "to": "l2", "susceptance": 1, "switchable": false, "initially_on": true}
  ],
  "weights": {"w1_default": 1, "w2_default": 1, "w1": {}, "w2": {}}
})";

constexpr std::string_view kT3Weighted = R"({
  "epsilon": 0.001,
  "buses": [
    {"id": "g0", "kind": "sync", "voltage": 1.02, "damping": 1.5, "inertia": 1, "p_in": 0, "disturbance": 0.75},
    {"id": "l1", "kind": "load", "voltage": 0.99, "damping": 2, "p_in": -0.3, "disturbance": 1},
    {"id": "l2", "kind": "load", "voltage": 1.01, "damping": 0.8, "p_in": -0.2, "disturbance": 0.4},
    {"id": "g1", "kind": "inverter", "voltage": 1, "damping": 0.6, "inertia": 2, "p_in": 0.35, "disturbance": 0.3}
  ],
  "branches": [
    {"from": "g0", "to": "l1", "susceptance": 3, "switchable": false, "initially_on": true},
    {"from": "l1", "to": "l2", "susceptance": 1.7, "switchable": false, "initially_on": true},
    {"from": "g1", "to": "l2", "susceptance": 2.5, "switchable": false, "initially_on": true}
  ],
  "weights": {"w1_default": 1, "w2_default": 1, "w1": {"l1-l2": 2.5, "g0-l1": 0.6}, "w2": {"g1": 0.7}}
})";

constexpr std::string_view kT3x = R"({
  "epsilon": 0.001,
  "buses": [
    {"id": "g0", "kind": "sync", "voltage": 1, "damping": 1, "inertia": 1, "p_in": 0, "disturbance": 1},
    {"id": "l1", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 1},
    {"id": "l2", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 1},
    {"id": "g1", "kind": "inverter", "voltage": 1, "damping": 1, "inertia": 2, "p_in": 0, "disturbance": 1},
    {"id": "a", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 1},
    {"id": "c", "kind": "load", "voltage": 1, "damping": 1, "p_in": 0, "disturbance": 1}
  ],
  "branches": [
    {"from": "g0", "to": "l1", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "l1", "to": "l2", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "g1", "to": "l2", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "l1", "to": "a", "susceptance": 4, "switchable": false, "initially_on": true},
    {"from": "a", "to": "l2", "susceptance": 1, "switchable": true, "initially_on": false},
    {"from": "l1", "to": "c", "susceptance": 1, "switchable": false, "initially_on": true},
    {"from": "c", "to": "l2", "susceptance": 2, "switchable": true, "initially_on": false}
  ],
  "weights": {"w1_default": 1, "w2_default": 1, "w1": {}, "w2": {}}
})";

double relative(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

class Runner {
 public:
  void check(std::string name, const std::string& fixture, double value, double tolerance,
             std::string detail = {}) {
    report.checks.push_back({std::move(name), fixture, value <= tolerance, false, value,
                             tolerance, std::move(detail)});
  }
  void skip(std::string name, const std::string& fixture, std::string why) {
    report.checks.push_back({std::move(name), fixture, true, true, 0.0, 0.0, std::move(why)});
  }
  void guard(const std::string& name, const std::string& fixture, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report.checks.push_back({name, fixture, false, false, 0.0, 0.0, e.what()});
    }
  }
  SelfcheckReport report;
};

void check_grid(Runner& run, const std::string& name, const Grid& grid, unsigned threads) {
  run.guard("pipeline", name, [&] {
    const EquilibriumState eq = solve_equilibrium(grid, grid.initial_on());
    const LaplacianDecomposition d = decompose_laplacians(grid, eq);
    const TracePi t = trace_pi(d);

    run.check("trace_decomposition", name, relative(t.decomposed, t.direct), 1e-9);
    run.check("schur_identity", name, schur_identity_error(d), 1e-10);
    run.check("block_inverse", name, block_inverse_error(d), 1e-9);

    const H2Report r = h2_report(grid, eq, H2Method::All);
    const double g = *r.h2_squared_gramian;
    const double slack = 1e-8 * std::max(1.0, g);
    run.check("bound_ordering", name,
              std::max({0.0, *r.lower_bound - g - slack, g - *r.upper_bound - slack}), 0.0,
              fmt::format("{:.9g} <= {:.9g} <= {:.9g}", *r.lower_bound, g, *r.upper_bound));

    if (!r.h2_squared_closed) {
      run.skip("closed_vs_gramian", name, "disturbance/damping ratios are not uniform");
      run.skip("sensitivity_sign", name, "closed form unavailable");
      run.skip("sensitivity_fd", name, "closed form unavailable");
      return;
    }
    run.check("closed_vs_gramian", name, std::fabs(*r.h2_squared_closed - g) / g, 1e-8);

    std::vector<std::size_t> lines(grid.index().load_edges);
    SwitchingOptions options;
    options.threads = threads;
    const SensitivityTable table = sensitivities_all(grid, eq, d, lines, options);
    const double worst = *std::max_element(table.values.begin(), table.values.end());
    run.check("sensitivity_sign", name, std::max(0.0, worst), 0.0,
              fmt::format("largest sensitivity {:.6g}", worst));
    double fd_error = 0.0;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const double fd = sensitivity_finite_difference(grid, eq, lines[k]);
      fd_error = std::max(fd_error, std::fabs(fd - table.values[k]) / std::fabs(table.values[k]));
    }
    run.check("sensitivity_fd", name, fd_error, 1e-4);
  });
}

}  // namespace

bool SelfcheckReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string_view t3_fixture_json() { return kT3; }
std::string_view t3_heterogeneous_fixture_json() { return kT3Heterogeneous; }
std::string_view t3_weighted_fixture_json() { return kT3Weighted; }
std::string_view t3x_fixture_json() { return kT3x; }

SelfcheckReport run_selfcheck(unsigned threads) {
  Runner run;
  const std::pair<const char*, std::string_view> fixtures[] = {
      {"t3", kT3}, {"t3_hetero", kT3Heterogeneous}, {"t3_weighted", kT3Weighted}, {"t3x", kT3x}};
  for (const auto& [name, text] : fixtures) {
    run.guard("parse", name, [&] { check_grid(run, name, parse_grid_json(text), threads); });
  }
  run.guard("t3_value", "t3", [&] {
    const Grid grid = parse_grid_json(kT3);
    const double g = h2_gramian(build_state_space(grid, solve_equilibrium(grid, grid.initial_on())));
    run.check("t3_value", "t3", std::fabs(g - 1.75), 1e-9, fmt::format("{:.12g}", g));
  });
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const std::string name = fmt::format("synthetic_{}", seed);
    run.guard("parse", name, [&] {
      SyntheticOptions o;
      o.loads = 6 + 2 * seed;
      o.generators = 2 + seed;
      o.extra_lines = 3;
      o.dispatchable = 2;
      o.seed = seed;
      check_grid(run, name, make_synthetic_grid(o), threads);
    });
  }
  return run.report;
}

}  // namespace gridswitch
