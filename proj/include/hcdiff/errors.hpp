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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hcdiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested dimension is outside what the operation supports.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A score was requested at a state carrying no probability mass.
class ZeroMassError : public Error {
 public:
  ZeroMassError(std::uint64_t state, const std::string& what)
      : Error(what), state_(state) {}
  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// A score function produced a transition row whose total exceeds the
/// uniformization rate of the current interval.
class RateBoundError : public Error {
 public:
  RateBoundError(std::uint64_t state, double time, std::size_t interval,
                 double total_rate, double lambda);
  std::uint64_t state() const noexcept { return state_; }
  double time() const noexcept { return time_; }
  std::size_t interval() const noexcept { return interval_; }

 private:
  std::uint64_t state_;
  double time_;
  std::size_t interval_;
};

/// Numerical integration left the valid region (negative mass, non-finite values).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hcdiff
