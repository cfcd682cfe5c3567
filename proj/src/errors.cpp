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

#include "hcdiff/errors.hpp"

#include <sstream>

namespace hcdiff {

namespace {

std::string describe_rate_violation(std::uint64_t state, double time, std::size_t interval,
                                    double total_rate, double lambda) {
  std::ostringstream os;
  os.precision(17);
  os << "transition rates exceed the uniformization bound: state " << state << ", time "
     << time << ", interval " << interval << ", total rate " << total_rate << " > lambda "
     << lambda;
  return os.str();
}

}  // namespace

RateBoundError::RateBoundError(std::uint64_t state, double time, std::size_t interval,
                               double total_rate, double lambda)
    : Error(describe_rate_violation(state, time, interval, total_rate, lambda)),
      state_(state),
      time_(time),
      interval_(interval) {}

}  // namespace hcdiff
