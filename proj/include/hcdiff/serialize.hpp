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

// File formats.
//
// Binary files are little-endian regardless of host byte order.
//
//   distribution (.hcdd):  "HCDD" | u32 version=1 | u32 d | u32 reserved=0 |
//                          2^d x f64 mass (index = state word)
//   score table  (.hcst):  "HCST" | u32 version=1 | u32 d | u32 B |
//                          (B+1) x f64 bucket edges |
//                          B*2^d*d x f64 theta, row-major (bucket, state, coordinate)
//
// JSON distribution: {"format_version": 1, "d": d, "mass": [...]}.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "hcdiff/hypercube.hpp"
#include "hcdiff/losses.hpp"
#include "hcdiff/score_train.hpp"

namespace hcdiff {

inline constexpr std::uint32_t kDistributionFormatVersion = 1;
inline constexpr std::uint32_t kScoreTableFormatVersion = 1;

nlohmann::json distribution_to_json(const DenseDistribution& p);
DenseDistribution distribution_from_json(const nlohmann::json& j);
void write_distribution_binary(std::ostream& os, const DenseDistribution& p);
DenseDistribution read_distribution_binary(std::istream& is);

void write_score_table(std::ostream& os, const ScoreTable& table);
ScoreTable read_score_table(std::istream& is);
ScoreTable read_score_table(const std::filesystem::path& path);
nlohmann::json score_table_metadata(const ScoreTable& table);

nlohmann::json to_json(const LossReport& report);
nlohmann::json to_json(const TrainReport& report);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace hcdiff
