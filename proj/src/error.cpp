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

#include "gridswitch/error.hpp"

namespace gridswitch {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Schema: return "Schema";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::UnknownEdge: return "UnknownEdge";
    case ErrorKind::EdgeNotActive: return "EdgeNotActive";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InsecureEquilibrium: return "InsecureEquilibrium";
    case ErrorKind::NonPositiveDamping: return "NonPositiveDamping";
    case ErrorKind::NotHurwitz: return "NotHurwitz";
    case ErrorKind::ResidualFailure: return "ResidualFailure";
    case ErrorKind::SingularLHH: return "SingularLHH";
    case ErrorKind::DisconnectedLoadGraph: return "DisconnectedLoadGraph";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::EmptyCandidates: return "EmptyCandidates";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace gridswitch
