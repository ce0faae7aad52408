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

#include <string>
#include <string_view>
#include <vector>

namespace gridswitch {

struct CheckResult {
  std::string name;
  std::string fixture;
  bool passed = false;
  bool skipped = false;
  double value = 0.0;      // measured error or quantity
  double tolerance = 0.0;
  std::string detail;
};

struct SelfcheckReport {
  std::vector<CheckResult> checks;
  bool ok() const;
};

/// Built-in fixture grids as grid-file JSON text.
std::string_view t3_fixture_json();
std::string_view t3_heterogeneous_fixture_json();
std::string_view t3_weighted_fixture_json();
std::string_view t3x_fixture_json();

/// Decomposition identity, bound ordering, closed form vs Gramian,
/// sensitivity sign and finite-difference checks on the built-in fixtures
/// plus a few seeded synthetic grids.
SelfcheckReport run_selfcheck(unsigned threads = 1);

}  // namespace gridswitch
