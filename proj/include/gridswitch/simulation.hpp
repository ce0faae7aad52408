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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "gridswitch/linearization.hpp"

namespace gridswitch {

/// Zero-order-hold discretization: x_{k+1} = Ad x_k + Bd u_k.
struct DiscreteSystem {
  Eigen::MatrixXd Ad;
  Eigen::MatrixXd Bd;
  double dt = 0.0;
};

/// (e^{A dt}, int_0^dt e^{A s} ds B) from one exponential of [[A, B], [0, 0]] dt.
DiscreteSystem discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt);
DiscreteSystem discretize(const StateSpace& ss, double dt);

enum class DisturbanceMode {
  Impulse,  // unit impulse on every input at t = 0
  Noise,    // truncated N(0,1) on [-1, 1], redrawn every `interval` seconds
  White,    // N(0, 1/dt) redrawn every step (unit-intensity white noise)
};

std::string_view to_string(DisturbanceMode mode) noexcept;
/// "impulse" | "noise" | "white"; throws Error(Schema) otherwise.
DisturbanceMode parse_disturbance_mode(std::string_view name);

struct DisturbanceSpec {
  DisturbanceMode mode = DisturbanceMode::Noise;
  double interval = 2.0;
  double horizon = 600.0;
  double dt = 0.02;
  std::uint64_t seed = 42;

  /// Throws Error(Schema) on non-positive times or when dt does not divide
  /// the hold interval.
  void validate() const;
  std::size_t steps() const;
  std::size_t hold_steps() const;
};

/// Standard normal restricted to [lo, hi] by rejection.
class TruncatedNormal {
 public:
  explicit TruncatedNormal(double lo = -1.0, double hi = 1.0);
  double operator()(boost::random::mt19937_64& engine);

 private:
  double lo_;
  double hi_;
  boost::random::normal_distribution<double> normal_;
};

struct SimulationOptions {
  /// Keep the sampled output trajectory (otherwise only S and statistics).
  bool record_trajectory = true;
};

struct SimulationResult {
  std::vector<double> time;
  std::size_t edge_channels = 0;
  std::size_t frequency_channels = 0;
  /// Row-major, one row per time sample: the weighted outputs y = C x.
  std::vector<double> outputs;
  /// Same layout in physical units: angle differences (rad) then SF
  /// frequency deviations (Hz).
  std::vector<double> physical;
  double s_accumulative = 0.0;  // int_0^T y^T y dt
  double s_average = 0.0;       // s_accumulative / T
  std::vector<double> mean_abs_dtheta;  // per branch
  std::vector<double> mean_abs_df;      // per non-reference SF bus
  double horizon = 0.0;

  std::size_t channels() const noexcept { return edge_channels + frequency_channels; }
  double mean_of_mean_abs_df() const;
  double sum_of_mean_abs_dtheta() const;
};

/// Simulates from x(0) = 0. Impulse mode starts from x(0+) = B 1 instead.
SimulationResult simulate(const StateSpace& ss, const DisturbanceSpec& spec,
                          const SimulationOptions& options = {});

/// Mean of S_average over `seeds` consecutive seeds starting at spec.seed,
/// run on up to `threads` workers.
double mean_s_average(const StateSpace& ss, const DisturbanceSpec& spec,
                      std::size_t seeds, unsigned threads = 1);

/// sum over input columns of int_0^T ||C e^{At} b||^2 dt, integrated exactly
/// per step of length dt.
double impulse_energy(const StateSpace& ss, double horizon, double dt);

/// Smallest T = 2^k (k >= 0) with ||e^{AT}||_2 <= tol.
double settling_horizon(const Eigen::MatrixXd& A, double tol = 1e-8);

}  // namespace gridswitch
