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

#include "gridswitch/lyapunov.hpp"

#include <complex>

#include <fmt/format.h>

#include "gridswitch/error.hpp"
#include "gridswitch/linearization.hpp"

namespace gridswitch {

namespace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Solves T^H X + X T = -F for upper-triangular T, column by column.
ComplexMatrix triangular_solve(const ComplexMatrix& T, const ComplexMatrix& F) {
  const Eigen::Index n = T.rows();
  ComplexMatrix X = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex rhs = -F(i, j);
      for (Eigen::Index k = 0; k < i; ++k) rhs -= std::conj(T(k, i)) * X(k, j);
      for (Eigen::Index k = 0; k < j; ++k) rhs -= X(i, k) * T(k, j);
      X(i, j) = rhs / (std::conj(T(i, i)) + T(j, j));
    }
  }
  return X;
}

}  // namespace

double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P,
                         const Eigen::MatrixXd& Q) {
  return (A.transpose() * P + P * A + Q).norm();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  if (A.rows() != A.cols() || Q.rows() != Q.cols() || A.rows() != Q.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "solve_lyapunov: A and Q must be square and of equal size");
  }
  const Eigen::Index n = A.rows();
  if (n == 0) return Eigen::MatrixXd(0, 0);

  Eigen::ComplexSchur<ComplexMatrix> schur(A.cast<Complex>());
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "Schur decomposition failed");
  }
  const ComplexMatrix& T = schur.matrixT();
  const ComplexMatrix& U = schur.matrixU();
  double abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) abscissa = std::max(abscissa, T(i, i).real());
  if (!(abscissa < kHurwitzMargin)) {
    throw Error(ErrorKind::NotHurwitz,
                fmt::format("A is not Hurwitz (spectral abscissa {:.3e})", abscissa));
  }

  auto solve = [&](const Eigen::MatrixXd& rhs) {
    const ComplexMatrix F = U.adjoint() * rhs.cast<Complex>() * U;
    const ComplexMatrix X = triangular_solve(T, F);
    Eigen::MatrixXd P = (U * X * U.adjoint()).real();
    return Eigen::MatrixXd(0.5 * (P + P.transpose()));
  };

  Eigen::MatrixXd P = solve(Q);
  const double target = 1e-9 * Q.norm();
  double residual = lyapunov_residual(A, P, Q);
  if (residual > target) {
    const Eigen::MatrixXd R = A.transpose() * P + P * A + Q;
    P += solve(R);
    residual = lyapunov_residual(A, P, Q);
  }
  if (residual > target) {
    throw Error(ErrorKind::ResidualFailure,
                fmt::format("Lyapunov residual {:.3e} exceeds {:.3e}", residual, target));
  }
  return P;
}

}  // namespace gridswitch
