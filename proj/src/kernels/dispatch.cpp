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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gridswitch/kernels.hpp"

namespace gridswitch::kernels {

namespace {

struct Table {
  Isa isa;
  void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*, bool);
  double (*sum_squares)(const double*, std::size_t);
  void (*accumulate_abs)(const double*, double*, std::size_t);
};

constexpr Table kScalar{Isa::Scalar, scalar::gemv, scalar::sum_squares,
                        scalar::accumulate_abs};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{Isa::Avx2, avx2::gemv, avx2::sum_squares, avx2::accumulate_abs};
#endif
#if defined(__aarch64__)
constexpr Table kNeon{Isa::Neon, neon::gemv, neon::sum_squares, neon::accumulate_abs};
#endif

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &kScalar;
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return &kAvx2;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return &kNeon;
#endif
    default: return nullptr;
  }
}

const Table* initial_table() {
  Isa isa = best_isa();
  if (const char* env = std::getenv("GRIDSWITCH_ISA")) {
    const std::string name(env);
    for (Isa candidate : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == isa_name(candidate) && isa_supported(candidate)) isa = candidate;
    }
  }
  return table_for(isa);
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() noexcept { return current().load()->isa; }

void select_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernel ISA not supported: " + std::string(isa_name(isa)));
  }
  current().store(table_for(isa));
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y, bool accumulate) {
  if (a.size() < rows * cols || x.size() < cols || y.size() < rows) {
    throw std::invalid_argument("gemv: span sizes do not match the shape");
  }
  current().load()->gemv(a.data(), rows, cols, x.data(), y.data(), accumulate);
}

double sum_squares(std::span<const double> v) {
  return current().load()->sum_squares(v.data(), v.size());
}

void accumulate_abs(std::span<const double> v, std::span<double> acc) {
  if (acc.size() < v.size()) {
    throw std::invalid_argument("accumulate_abs: accumulator too short");
  }
  current().load()->accumulate_abs(v.data(), acc.data(), v.size());
}

}  // namespace gridswitch::kernels
