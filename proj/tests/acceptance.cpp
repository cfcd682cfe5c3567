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

// Runs every acceptance criterion at its pinned tolerance and prints one
// pass/fail line per criterion. Usage: hcdiff_acceptance [quick|full] [ids...]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "hcdiff/verify.hpp"

int main(int argc, char** argv) {
  hcdiff::VerifyOptions options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "quick" || arg == "full") {
      options.profile = hcdiff::parse_profile(arg);
    } else {
      options.only.push_back(std::atoi(arg.c_str()));
    }
  }
  std::printf("acceptance profile=%s seed=%llu\n", hcdiff::to_string(options.profile).c_str(),
              static_cast<unsigned long long>(options.seed));
  std::fflush(stdout);
  int failed = 0;
  int total = 0;
  for (const auto& r : hcdiff::run_acceptance(options)) {
    std::printf("%s\n", hcdiff::format_result(r).c_str());
    failed += r.passed ? 0 : 1;
    ++total;
  }
  std::printf("%d/%d criteria passed\n", total - failed, total);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
