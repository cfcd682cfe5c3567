// Copyright 2026 The hcdiff Authors
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

// The acceptance suite: every criterion runs at a pinned tolerance and
// reports pass/fail with the measured values.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hcdiff {

enum class Profile { quick, full };

Profile parse_profile(const std::string& name);
std::string to_string(Profile p);

struct VerifyOptions {
  /// quick divides sample counts by 10 and widens statistical tolerances by
  /// sqrt(10); deterministic checks are unchanged.
  Profile profile = Profile::full;
  std::uint64_t seed = 20260101;
  unsigned workers = 1;
  /// Criterion ids to run; empty runs all.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
};

inline constexpr int kCriterionCount = 12;

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options);

/// One line per criterion: "PASS  [ 5] title: detail".
std::string format_result(const CriterionResult& r);

}  // namespace hcdiff
