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

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "gridswitch/error.hpp"
#include "gridswitch/grid.hpp"

namespace gridswitch::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(GRIDSWITCH_FIXTURES) / name;
}

inline Grid load_fixture(const std::string& name) { return load_grid(fixture(name)); }

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace gridswitch::testing

/// Expects `stmt` to throw gridswitch::Error of `kind`.
#define EXPECT_GRID_ERROR(stmt, error_kind)                                          \
  do {                                                                               \
    try {                                                                            \
      stmt;                                                                          \
      ADD_FAILURE() << "expected " << ::gridswitch::to_string(error_kind);          \
    } catch (const ::gridswitch::Error& e_) {                                        \
      EXPECT_EQ(e_.kind(), error_kind) << e_.what();                                 \
    }                                                                                \
  } while (0)
