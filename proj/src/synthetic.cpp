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

#include "gridswitch/synthetic.hpp"

#include <set>
#include <utility>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <fmt/format.h>

#include "gridswitch/power_flow.hpp"

namespace gridswitch {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  // Boost's uniform_real spins forever on an empty interval.
  double real(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t n) {
    return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  boost::random::mt19937_64 engine_;
};

Grid build(const SyntheticOptions& o, double scale) {
  Draw draw(o.seed);
  const std::size_t L = o.loads;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto load_id = [](std::size_t k) { return fmt::format("l{}", k); };
  auto add_line = [&](std::size_t a, std::size_t b, double susceptance, bool switchable) {
    used.insert({std::min(a, b), std::max(a, b)});
    branches.push_back({load_id(a), load_id(b), susceptance, switchable, !switchable});
  };
  auto random_pair = [&]() -> std::pair<std::size_t, std::size_t> {
    for (int tries = 0; tries < 1000; ++tries) {
      const std::size_t a = draw.index(L);
      const std::size_t b = draw.index(L);
      if (a != b && !used.contains({std::min(a, b), std::max(a, b)})) return {a, b};
    }
    throw Error(ErrorKind::InvalidGrid, "synthetic grid: no free load pair left");
  };

  // Generators first so the reference is g0.
  double total_load = 0.0;
  std::vector<double> load_p(L, 0.0);
  std::vector<bool> zero(L, false);
  for (std::size_t k = 0; k < L; ++k) {
    zero[k] = draw.real(0.0, 1.0) < o.zero_injection_fraction;
    load_p[k] = zero[k] ? 0.0 : -draw.real(0.0, scale);
    total_load -= load_p[k];
  }
  const std::size_t G = o.generators;
  for (std::size_t g = 0; g < G; ++g) {
    Bus b;
    b.id = fmt::format("g{}", g);
    b.kind = g % 2 == 0 ? BusKind::SyncGen : BusKind::FormingInverter;
    b.voltage = draw.real(0.98, 1.05);
    b.inertia = draw.real(1.0, 6.0);
    b.damping = draw.real(0.5, 2.0);
    b.p_in = g == 0 ? 0.0 : total_load / static_cast<double>(G);
    b.disturbance = b.damping * (o.uniform_ratio ? o.lambda_d : o.lambda_d * draw.real(0.3, 3.0));
    buses.push_back(std::move(b));
  }
  for (std::size_t k = 0; k < L; ++k) {
    Bus b;
    b.id = load_id(k);
    b.voltage = draw.real(0.95, 1.05);
    b.p_in = load_p[k];
    b.damping = zero[k] ? 0.0 : draw.real(0.5, 2.0);
    const double d = zero[k] ? Grid::kDefaultEpsilon : b.damping;
    b.disturbance = d * (o.uniform_ratio ? o.lambda_d : o.lambda_d * draw.real(0.3, 3.0));
    buses.push_back(std::move(b));
  }
  for (std::size_t g = 0; g < G; ++g) {
    branches.push_back({fmt::format("g{}", g), load_id(draw.index(L)), draw.real(4.0, 12.0), false, true});
  }
  for (std::size_t k = 1; k < L; ++k) add_line(draw.index(k), k, draw.real(1.0, 5.0), false);
  for (std::size_t k = 0; k < o.extra_lines; ++k) {
    const auto [a, b] = random_pair();
    add_line(a, b, draw.real(1.0, 5.0), false);
  }
  for (std::size_t k = 0; k < o.dispatchable; ++k) {
    const auto [a, b] = random_pair();
    add_line(a, b, draw.real(0.5, 5.0), true);
  }
  std::vector<double> w1(branches.size(), 1.0);
  std::vector<double> w2(G - 1, 1.0);
  return Grid::create(std::move(buses), std::move(branches), Grid::kDefaultEpsilon,
                      std::move(w1), std::move(w2));
}

bool secure(const Grid& grid, const EdgeSet& active) {
  try {
    return solve_equilibrium(grid, active).wp_min() > 0.0;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Grid make_synthetic_grid(const SyntheticOptions& options) {
  if (options.loads < 2 || options.generators < 1) {
    throw Error(ErrorKind::InvalidGrid, "synthetic grid needs >= 2 loads and >= 1 generator");
  }
  double scale = options.injection_scale;
  for (int attempt = 0; attempt < 12; ++attempt, scale *= 0.5) {
    Grid grid = build(options, scale);
    EdgeSet all_on = grid.initial_on();
    for (std::size_t e : grid.dispatchable().indices()) all_on.insert(e);
    if (secure(grid, grid.initial_on()) && secure(grid, all_on)) return grid;
  }
  throw Error(ErrorKind::InsecureEquilibrium, "synthetic grid: no secure equilibrium found");
}

}  // namespace gridswitch
