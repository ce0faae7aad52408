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

#include <Eigen/Dense>

namespace gridswitch {

/// Solves A^T P + P A + Q = 0 for Hurwitz A and symmetric Q.
///
/// Bartels-Stewart on the complex Schur form of A, followed by one step of
/// iterative refinement when the first residual misses the target. Throws
/// NotHurwitz if some eigenvalue has real part >= -1e-9 and ResidualFailure
/// if ||A^T P + P A + Q||_F > 1e-9 ||Q||_F after refinement.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// ||A^T P + P A + Q||_F
double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P,
                         const Eigen::MatrixXd& Q);

}  // namespace gridswitch
