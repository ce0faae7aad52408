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

#include "gridswitch/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gridswitch/error.hpp"
#include "gridswitch/h2.hpp"
#include "gridswitch/io.hpp"
#include "gridswitch/kernels.hpp"
#include "gridswitch/linearization.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/selfcheck.hpp"
#include "gridswitch/simulation.hpp"
#include "gridswitch/switching.hpp"

#ifndef GRIDSWITCH_VERSION
#define GRIDSWITCH_VERSION "dev"
#endif

namespace gridswitch::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Globals {
  std::string grid;
  std::string out;
  std::uint64_t seed = 42;
  bool quiet = false;
  unsigned threads = 1;
};

struct Options {
  std::string method = "all";
  bool assume_uniform = false;
  std::size_t n_on = 20;
  std::string trace;
  std::string plan;
  std::string mode = "noise";
  double tf = 600.0;
  double dt = 0.02;
  double interval = 2.0;
  std::string stats;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Session {
 public:
  Session(const Globals& g, std::string command, std::ostream& out)
      : globals_(g), command_(std::move(command)), out_(out), start_(Clock::now()) {}

  Grid load() {
    if (globals_.grid.empty()) throw UsageError("--grid is required");
    const std::string text = read_text(globals_.grid);
    digest_ = sha256_hex(text);
    return parse_grid_json(text);
  }

  void flag(const std::string& name, Json value) { flags_[name] = std::move(value); }
  void use_seed() { seeded_ = true; }

  unsigned threads() const {
    if (globals_.threads > 0) return globals_.threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  void say(const std::string& line) {
    if (!globals_.quiet) out_ << line << '\n';
  }

  /// Writes the primary JSON output (or prints it) plus the manifest.
  void emit(const Json& doc) {
    if (globals_.out.empty()) {
      out_ << doc.dump(2) << '\n';
      return;
    }
    write_json(globals_.out, doc);
    finish(globals_.out);
  }

  void finish(const fs::path& primary) {
    RunManifest m;
    m.command = command_;
    m.flags = flags_;
    m.flags["grid"] = globals_.grid;
    m.flags["out"] = globals_.out;
    m.flags["threads"] = globals_.threads;
    m.flags["quiet"] = globals_.quiet;
    m.grid_sha256 = digest_;
    if (seeded_) m.seed = globals_.seed;
    m.version = GRIDSWITCH_VERSION;
    m.isa = std::string(kernels::isa_name(kernels::active_isa()));
    m.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    write_json(manifest_path(primary), manifest_json(m));
  }

  const Globals& globals() const { return globals_; }

 private:
  Globals globals_;
  std::string command_;
  std::ostream& out_;
  Clock::time_point start_;
  std::string digest_;
  Json flags_ = Json::object();
  bool seeded_ = false;
};

H2Method parse_method(const std::string& name) {
  if (name == "gramian") return H2Method::Gramian;
  if (name == "closed") return H2Method::Closed;
  if (name == "bounds") return H2Method::Bounds;
  return H2Method::All;
}

std::string show(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("n/a");
}

void cmd_equilibrium(Session& s) {
  const Grid grid = s.load();
  const EquilibriumState eq = solve_equilibrium(grid, grid.initial_on());
  s.say(fmt::format("equilibrium: {} iterations, residual {:.3e}, wp_min {}", eq.iterations,
                    eq.residual, format_number(eq.wp_min())));
  s.emit(equilibrium_json(grid, eq));
}

void cmd_linearize(Session& s) {
  const Grid grid = s.load();
  const StateSpace ss = build_state_space(grid, solve_equilibrium(grid, grid.initial_on()));
  const HurwitzResult h = hurwitz_check(ss.A);
  Json doc = state_space_json(ss);
  doc["hurwitz"] = h.hurwitz;
  doc["spectral_abscissa"] = round_significant(h.abscissa);
  s.say(fmt::format("state space: n={} m={} p={}, spectral abscissa {}", ss.states(),
                    ss.inputs(), ss.outputs(), format_number(h.abscissa)));
  s.emit(doc);
}

void cmd_h2(Session& s, const Options& o) {
  s.flag("method", o.method);
  s.flag("assume_uniform", o.assume_uniform);
  const Grid grid = s.load();
  const EquilibriumState eq = solve_equilibrium(grid, grid.initial_on());
  const H2Report r = h2_report(grid, eq, parse_method(o.method),
                               ClosedFormOptions{.assume_uniform = o.assume_uniform});
  s.say(fmt::format("h2_squared gramian {} closed {} bounds [{}, {}]",
                    show(r.h2_squared_gramian), show(r.h2_squared_closed),
                    show(r.lower_bound), show(r.upper_bound)));
  s.emit(h2_report_json(r));
}

void cmd_switch(Session& s, const Options& o) {
  s.flag("n_on", o.n_on);
  s.flag("trace", o.trace);
  s.flag("assume_uniform", o.assume_uniform);
  const Grid grid = s.load();
  SwitchingOptions options;
  options.closed_form.assume_uniform = o.assume_uniform;
  options.threads = s.threads();
  const SwitchingPlan plan = greedy_switch(grid, grid.dispatchable(), o.n_on, options);
  for (std::size_t k = 0; k < plan.selected.size(); ++k) {
    s.say(fmt::format("iteration {}: switch on {} -> h2_squared {}", k + 1,
                      grid.edge_id(plan.selected[k]), format_number(plan.h2_trajectory[k + 1])));
  }
  if (!o.trace.empty()) write_text(o.trace, trace_csv(grid, plan));
  s.emit(plan_json(grid, plan));
}

void cmd_simulate(Session& s, const Options& o) {
  s.use_seed();
  s.flag("plan", o.plan);
  s.flag("mode", o.mode);
  s.flag("tf", o.tf);
  s.flag("dt", o.dt);
  s.flag("interval", o.interval);
  s.flag("stats", o.stats);
  const Grid grid = s.load();
  EdgeSet on = grid.initial_on();
  if (!o.plan.empty()) {
    for (std::size_t e : read_plan(grid, o.plan)) on.insert(e);
  }
  const StateSpace ss = build_state_space(grid, solve_equilibrium(grid, on));
  DisturbanceSpec spec;
  spec.mode = parse_disturbance_mode(o.mode);
  spec.horizon = o.tf;
  spec.dt = o.dt;
  spec.interval = o.interval;
  spec.seed = s.globals().seed;
  const bool trajectory = !s.globals().out.empty();
  const SimulationResult r = simulate(ss, spec, SimulationOptions{.record_trajectory = trajectory});
  s.say(fmt::format("S_average {} S_accumulative {} sum E|dtheta| {} mean E|df| {}",
                    format_number(r.s_average), format_number(r.s_accumulative),
                    format_number(r.sum_of_mean_abs_dtheta()),
                    format_number(r.mean_of_mean_abs_df())));
  const Json stats = stats_json(grid, ss, r);
  if (!o.stats.empty()) write_json(o.stats, stats);
  if (trajectory) {
    write_text(s.globals().out, simulation_csv(grid, ss, r));
    s.finish(s.globals().out);
  } else if (!o.stats.empty()) {
    s.finish(o.stats);
  } else {
    s.emit(stats);
  }
}

int cmd_selfcheck(Session& s, std::ostream& out) {
  const SelfcheckReport report = run_selfcheck(s.threads());
  Json checks = Json::array();
  for (const CheckResult& c : report.checks) {
    if (!s.globals().quiet || !c.passed) {
      out << fmt::format("{} {:<18} {:<14} {:.3e} (tol {:.0e}) {}\n",
                         c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL"), c.name, c.fixture,
                         c.value, c.tolerance, c.detail);
    }
    checks.push_back({{"name", c.name},
                      {"fixture", c.fixture},
                      {"passed", c.passed},
                      {"skipped", c.skipped},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  if (!s.globals().out.empty()) {
    write_json(s.globals().out, Json{{"ok", report.ok()}, {"checks", checks}});
    s.finish(s.globals().out);
  }
  if (!report.ok()) throw Error(ErrorKind::NumericalFailure, "selfcheck failed");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"H2-norm transmission switching for structure-preserved grids", "gridswitch"};
  app.set_version_flag("--version", GRIDSWITCH_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  Options o;
  app.add_option("--grid", g.grid, "grid file (JSON)");
  app.add_option("--out", g.out, "primary output file");
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "suppress progress lines");
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->capture_default_str();

  auto* equilibrium = app.add_subcommand("equilibrium", "solve the lossless power flow");
  auto* linearize = app.add_subcommand("linearize", "assemble the state-space model");
  auto* h2 = app.add_subcommand("h2", "H2 norm via Gramian, closed form and bounds");
  h2->add_option("--method", o.method)
      ->check(CLI::IsMember({"gramian", "closed", "bounds", "all"}))
      ->capture_default_str();
  h2->add_flag("--assume-uniform", o.assume_uniform,
               "closed form with the mean disturbance/damping ratio");
  auto* sw = app.add_subcommand("switch", "greedy line switch-on plan");
  sw->add_option("--n-on", o.n_on, "lines to switch on")->capture_default_str();
  sw->add_option("--trace", o.trace, "per-iteration sensitivity table (CSV)");
  sw->add_flag("--assume-uniform", o.assume_uniform,
               "closed form with the mean disturbance/damping ratio");
  auto* sim = app.add_subcommand("simulate", "time-domain response of the linearization");
  sim->add_option("--plan", o.plan, "plan file whose lines are switched on");
  sim->add_option("--mode", o.mode)
      ->check(CLI::IsMember({"impulse", "noise", "white"}))
      ->capture_default_str();
  sim->add_option("--tf", o.tf, "horizon in seconds")->capture_default_str();
  sim->add_option("--dt", o.dt, "step in seconds")->capture_default_str();
  sim->add_option("--interval", o.interval, "disturbance hold time in seconds")
      ->capture_default_str();
  sim->add_option("--stats", o.stats, "response statistics (JSON)");
  auto* selfcheck = app.add_subcommand("selfcheck", "run the built-in invariant checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << GRIDSWITCH_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Session session(g, chosen->get_name(), out);
  try {
    if (chosen == equilibrium) cmd_equilibrium(session);
    if (chosen == linearize) cmd_linearize(session);
    if (chosen == h2) cmd_h2(session, o);
    if (chosen == sw) cmd_switch(session, o);
    if (chosen == sim) cmd_simulate(session, o);
    if (chosen == selfcheck) return cmd_selfcheck(session, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump()
        << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << Json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace gridswitch::cli
