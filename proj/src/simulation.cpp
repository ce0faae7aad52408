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

#include "gridswitch/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "gridswitch/error.hpp"
#include "gridswitch/kernels.hpp"

namespace gridswitch {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  const RowMajor r = m;
  return {r.data(), r.data() + r.size()};
}

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::NumericalFailure, fmt::format("{} is not finite", what));
  }
}

// Phi = e^{A h} and G = int_0^h e^{A^T s} Q e^{A s} ds. The block exponential
// is taken on a step small enough for e^{-A^T h0} to stay tame, then doubled.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> step_gramian(const Eigen::MatrixXd& A,
                                                         const Eigen::MatrixXd& Q,
                                                         double h) {
  const Eigen::Index n = A.rows();
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  int doublings = 0;
  double h0 = h;
  while (norm * h0 > 0.5 && doublings < 60) {
    h0 *= 0.5;
    ++doublings;
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = -A.transpose() * h0;
  M.topRightCorner(n, n) = Q * h0;
  M.bottomRightCorner(n, n) = A * h0;
  const Eigen::MatrixXd E = M.exp();
  Eigen::MatrixXd phi = E.bottomRightCorner(n, n);
  Eigen::MatrixXd G = phi.transpose() * E.topRightCorner(n, n);
  G = 0.5 * (G + G.transpose()).eval();
  for (int k = 0; k < doublings; ++k) {
    G += phi.transpose() * G * phi;
    phi = (phi * phi).eval();
  }
  require_finite(G, "step Gramian");
  return {phi, 0.5 * (G + G.transpose())};
}

double operator_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

}  // namespace

DiscreteSystem discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Schema, "dt must be positive");
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "discretize: A must be square and match B");
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = A * dt;
  M.topRightCorner(n, m) = B * dt;
  const Eigen::MatrixXd E = M.exp();
  require_finite(E, "matrix exponential");
  return {E.topLeftCorner(n, n), E.topRightCorner(n, m), dt};
}

DiscreteSystem discretize(const StateSpace& ss, double dt) {
  return discretize(ss.A, ss.B, dt);
}

std::string_view to_string(DisturbanceMode mode) noexcept {
  switch (mode) {
    case DisturbanceMode::Impulse: return "impulse";
    case DisturbanceMode::Noise: return "noise";
    case DisturbanceMode::White: return "white";
  }
  return "noise";
}

DisturbanceMode parse_disturbance_mode(std::string_view name) {
  for (auto mode : {DisturbanceMode::Impulse, DisturbanceMode::Noise, DisturbanceMode::White}) {
    if (name == to_string(mode)) return mode;
  }
  throw Error(ErrorKind::Schema, fmt::format("unknown disturbance mode '{}'", name));
}

void DisturbanceSpec::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::Schema, "dt must be positive");
  if (!(interval > 0.0)) throw Error(ErrorKind::Schema, "interval must be positive");
  if (!(horizon >= 0.0)) throw Error(ErrorKind::Schema, "horizon must be nonnegative");
  if (mode == DisturbanceMode::Noise) {
    const double ratio = interval / dt;
    if (ratio < 1.0 - 1e-9 || std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      throw Error(ErrorKind::Schema,
                  fmt::format("dt {} does not divide the hold interval {}", dt, interval));
    }
  }
}

std::size_t DisturbanceSpec::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

std::size_t DisturbanceSpec::hold_steps() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / dt)));
}

TruncatedNormal::TruncatedNormal(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw Error(ErrorKind::Schema, "truncated normal needs lo < hi");
}

double TruncatedNormal::operator()(boost::random::mt19937_64& engine) {
  for (;;) {
    const double v = normal_(engine);
    if (v >= lo_ && v <= hi_) return v;
  }
}

double SimulationResult::mean_of_mean_abs_df() const {
  if (mean_abs_df.empty()) return 0.0;
  return std::accumulate(mean_abs_df.begin(), mean_abs_df.end(), 0.0) /
         static_cast<double>(mean_abs_df.size());
}

double SimulationResult::sum_of_mean_abs_dtheta() const {
  return std::accumulate(mean_abs_dtheta.begin(), mean_abs_dtheta.end(), 0.0);
}

SimulationResult simulate(const StateSpace& ss, const DisturbanceSpec& spec,
                          const SimulationOptions& options) {
  spec.validate();
  const std::size_t n = ss.states();
  const std::size_t m = ss.inputs();
  const std::size_t p = ss.outputs();
  if (static_cast<std::size_t>(ss.C.cols()) != n || static_cast<std::size_t>(ss.B.rows()) != n ||
      ss.output_scale.size() != p || ss.n_edge_outputs > p) {
    throw Error(ErrorKind::DimensionMismatch, "simulate: inconsistent state-space dimensions");
  }

  const DiscreteSystem sys = discretize(ss, spec.dt);
  const std::vector<double> ad = row_major(sys.Ad);
  const std::vector<double> bd = row_major(sys.Bd);
  const std::vector<double> c = row_major(ss.C);
  const std::size_t steps = spec.steps();
  const double dt = spec.dt;

  SimulationResult out;
  out.edge_channels = ss.n_edge_outputs;
  out.frequency_channels = p - ss.n_edge_outputs;
  out.horizon = static_cast<double>(steps) * dt;

  std::vector<double> to_physical(p);
  for (std::size_t k = 0; k < p; ++k) {
    to_physical[k] = 1.0 / ss.output_scale[k];
    if (k >= ss.n_edge_outputs) to_physical[k] /= 2.0 * std::numbers::pi;
  }

  std::vector<double> x(n, 0.0), next(n), y(p, 0.0), abs_sum(p, 0.0);
  auto record = [&](std::size_t k) {
    if (!options.record_trajectory) return;
    out.time.push_back(static_cast<double>(k) * dt);
    for (std::size_t j = 0; j < p; ++j) {
      out.outputs.push_back(y[j]);
      out.physical.push_back(y[j] * to_physical[j]);
    }
  };
  if (options.record_trajectory) {
    out.time.reserve(steps + 1);
    out.outputs.reserve((steps + 1) * p);
    out.physical.reserve((steps + 1) * p);
  }

  double energy = 0.0;
  if (spec.mode == DisturbanceMode::Impulse) {
    // Per-column free responses for S; their sum is the recorded trajectory.
    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    std::vector<double> prev_sq(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        cols[j][i] = ss.B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        x[i] += cols[j][i];
      }
      kernels::gemv(c, p, n, cols[j], y);
      prev_sq[j] = kernels::sum_squares(y);
    }
    kernels::gemv(c, p, n, x, y);
    kernels::accumulate_abs(y, abs_sum);
    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        kernels::gemv(ad, n, n, cols[j], next);
        cols[j].swap(next);
        kernels::gemv(c, p, n, cols[j], y);
        const double sq = kernels::sum_squares(y);
        energy += 0.5 * dt * (prev_sq[j] + sq);
        prev_sq[j] = sq;
      }
      kernels::gemv(ad, n, n, x, next);
      x.swap(next);
      kernels::gemv(c, p, n, x, y);
      kernels::accumulate_abs(y, abs_sum);
      record(k + 1);
    }
  } else {
    boost::random::mt19937_64 engine(spec.seed);
    TruncatedNormal truncated;
    boost::random::normal_distribution<double> white(0.0, 1.0 / std::sqrt(dt));
    std::vector<double> u(m, 0.0);
    const std::size_t hold = spec.mode == DisturbanceMode::Noise ? spec.hold_steps() : 1;
    double prev_sq = 0.0;
    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
      if (k % hold == 0) {
        for (auto& v : u) {
          v = spec.mode == DisturbanceMode::Noise ? truncated(engine) : white(engine);
        }
      }
      kernels::gemv(ad, n, n, x, next);
      kernels::gemv(bd, n, m, u, next, true);
      x.swap(next);
      kernels::gemv(c, p, n, x, y);
      const double sq = kernels::sum_squares(y);
      energy += 0.5 * dt * (prev_sq + sq);
      prev_sq = sq;
      kernels::accumulate_abs(y, abs_sum);
      record(k + 1);
    }
  }

  out.s_accumulative = energy;
  out.s_average = out.horizon > 0.0 ? energy / out.horizon : 0.0;
  const double samples = static_cast<double>(steps + 1);
  for (std::size_t j = 0; j < p; ++j) {
    const double mean = abs_sum[j] / samples * to_physical[j];
    (j < ss.n_edge_outputs ? out.mean_abs_dtheta : out.mean_abs_df).push_back(mean);
  }
  return out;
}

double mean_s_average(const StateSpace& ss, const DisturbanceSpec& spec,
                      std::size_t seeds, unsigned threads) {
  if (seeds == 0) return 0.0;
  std::vector<double> values(seeds, 0.0);
  const SimulationOptions options{.record_trajectory = false};
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      DisturbanceSpec local = spec;
      local.seed = spec.seed + s;
      values[s] = simulate(ss, local, options).s_average;
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, seeds);
  if (workers == 1) {
    work(0, seeds);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (seeds + workers - 1) / workers;
    for (std::size_t b = 0; b < seeds; b += chunk) {
      pool.emplace_back(work, b, std::min(seeds, b + chunk));
    }
  }
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(seeds);
}

double impulse_energy(const StateSpace& ss, double horizon, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Schema, "dt must be positive");
  if (!(horizon >= 0.0)) throw Error(ErrorKind::Schema, "horizon must be nonnegative");
  const HurwitzResult h = hurwitz_check(ss.A);
  if (!h.hurwitz) {
    throw Error(ErrorKind::NotHurwitz,
                fmt::format("A is not Hurwitz (spectral abscissa {:.3e})", h.abscissa));
  }
  if (horizon == 0.0 || ss.B.size() == 0) return 0.0;

  const Eigen::MatrixXd Q = ss.C.transpose() * ss.C;
  const auto full = static_cast<std::size_t>(std::floor(horizon / dt * (1.0 + 1e-12)));
  const double rest = horizon - static_cast<double>(full) * dt;

  Eigen::MatrixXd X = ss.B;
  double energy = 0.0;
  if (full > 0) {
    const auto [phi, G] = step_gramian(ss.A, Q, dt);
    for (std::size_t k = 0; k < full; ++k) {
      energy += (X.transpose() * G * X).trace();
      X = phi * X;
    }
  }
  if (rest > 1e-12 * horizon) {
    const auto [phi, G] = step_gramian(ss.A, Q, rest);
    energy += (X.transpose() * G * X).trace();
  }
  return energy;
}

double settling_horizon(const Eigen::MatrixXd& A, double tol) {
  double T = 1.0;
  for (int k = 0; k < 64; ++k, T *= 2.0) {
    const Eigen::MatrixXd E = (A * T).exp();
    if (E.allFinite() && operator_norm(E) <= tol) return T;
  }
  throw Error(ErrorKind::NotHurwitz, "state transition does not decay below tolerance");
}

}  // namespace gridswitch
