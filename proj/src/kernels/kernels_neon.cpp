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

#include <arm_neon.h>

#include <cmath>

#include "gridswitch/kernels.hpp"

namespace gridswitch::kernels::neon {

namespace {

inline double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x,
          double* y, bool accumulate) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double sum = dot(a + r * cols, x, cols);
    y[r] = accumulate ? y[r] + sum : sum;
  }
}

double sum_squares(const double* v, std::size_t n) { return dot(v, v, n); }

void accumulate_abs(const double* v, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vabsq_f64(vld1q_f64(v + i))));
  }
  for (; i < n; ++i) acc[i] += std::fabs(v[i]);
}

}  // namespace gridswitch::kernels::neon
