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

#include <cmath>

#include "gridswitch/kernels.hpp"

namespace gridswitch::kernels::scalar {

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x,
          double* y, bool accumulate) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) sum += row[c] * x[c];
    y[r] = accumulate ? y[r] + sum : sum;
  }
}

double sum_squares(const double* v, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += v[i] * v[i];
  return sum;
}

void accumulate_abs(const double* v, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += std::fabs(v[i]);
}

}  // namespace gridswitch::kernels::scalar
