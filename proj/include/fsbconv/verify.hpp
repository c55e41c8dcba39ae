// Copyright 2026 The fsbconv Authors.
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
#include <vector>

#include "fsbconv/tensor_io.hpp"

namespace fsbconv {

// Randomized oracle-equivalence suites. Each case draws shapes and operands
// from the seeded generator, runs a fast path against its reference, and
// tracks the normalized max error (see max_rel_error).
enum class Suite : int { wino1d = 0, wino2d, wino3d, fsb, hfa, trg };

const char* suite_name(Suite s);
std::vector<Suite> all_suites();

/// Accepts a suite name or "all"; throws Error on anything else.
std::vector<Suite> parse_suite_list(const std::string& name);

double suite_tolerance(Suite s, Dtype dtype);

struct SuiteResult {
  Suite suite;
  int cases = 0;
  double max_err = 0.0;
  double tol = 0.0;
  bool pass = false;
};

std::vector<SuiteResult> run_suites(const std::vector<Suite>& suites, int cases,
                                    std::uint64_t seed, Dtype dtype);

}  // namespace fsbconv
