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

// Dense inner-loop kernels for the time-domain simulator.
//
// Every kernel has a portable scalar reference and, where the target has
// them, AVX2+FMA (x86-64) or NEON (AArch64) variants. The variant is picked
// once at startup from the CPU features (override with GRIDSWITCH_ISA=
// scalar|avx2|neon) and can be switched at runtime for equivalence testing.

#include <cstddef>
#include <span>
#include <string_view>

namespace gridswitch::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
Isa best_isa() noexcept;
Isa active_isa() noexcept;
/// Throws std::invalid_argument when the CPU (or build) lacks `isa`.
void select_isa(Isa isa);

/// y = A x, or y += A x when `accumulate`. A is row-major rows x cols.
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y, bool accumulate = false);

/// sum_i v_i^2
double sum_squares(std::span<const double> v);

/// acc_i += |v_i|
void accumulate_abs(std::span<const double> v, std::span<double> acc);

// Raw variants, exposed for the equivalence tests.
namespace scalar {
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x,
          double* y, bool accumulate);
double sum_squares(const double* v, std::size_t n);
void accumulate_abs(const double* v, double* acc, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x,
          double* y, bool accumulate);
double sum_squares(const double* v, std::size_t n);
void accumulate_abs(const double* v, double* acc, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x,
          double* y, bool accumulate);
double sum_squares(const double* v, std::size_t n);
void accumulate_abs(const double* v, double* acc, std::size_t n);
}  // namespace neon
#endif

}  // namespace gridswitch::kernels
