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

#include "gridswitch/grid.hpp"

namespace gridswitch {

/// Random augmented grids: a connected load network, one internal bus per
/// generator/inverter hanging off a load, optional switchable corridors.
struct SyntheticOptions {
  std::size_t loads = 8;
  std::size_t generators = 3;    // SF buses, the first is the reference
  std::size_t extra_lines = 4;   // fixed load-load lines beyond a spanning tree
  std::size_t dispatchable = 0;  // switchable load-load lines, initially off
  bool uniform_ratio = true;     // Lambda_i = lambda_d * d_i on every bus
  double lambda_d = 1.0;
  double injection_scale = 0.3;  // load draw ~ U(0, scale) per bus
  double zero_injection_fraction = 0.0;  // loads with p_in = 0 and d = 0
  std::uint64_t seed = 1;
};

/// Retries with halved injections until both the base topology and the
/// all-dispatchable-on topology have secure equilibria.
Grid make_synthetic_grid(const SyntheticOptions& options);

}  // namespace gridswitch
