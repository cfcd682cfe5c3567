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

#include "hcdiff/serialize.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "hcdiff/errors.hpp"

namespace hcdiff {

namespace {

template <typename T>
void write_le(std::ostream& os, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), bytes.size())) throw Error("unexpected end of binary file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void expect_magic(std::istream& is, const char (&magic)[5]) {
  std::array<char, 4> got;
  if (!is.read(got.data(), 4) || std::memcmp(got.data(), magic, 4) != 0) {
    throw Error(std::string("bad magic, expected ") + magic);
  }
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json distribution_to_json(const DenseDistribution& p) {
  return {{"format_version", kDistributionFormatVersion},
          {"d", p.dim()},
          {"mass", std::vector<double>(p.mass().begin(), p.mass().end())}};
}

DenseDistribution distribution_from_json(const nlohmann::json& j) {
  const auto version = j.at("format_version").get<std::uint32_t>();
  if (version != kDistributionFormatVersion) {
    throw Error("unsupported distribution format_version " + std::to_string(version));
  }
  return DenseDistribution(j.at("d").get<int>(), j.at("mass").get<std::vector<double>>());
}

void write_distribution_binary(std::ostream& os, const DenseDistribution& p) {
  os.write("HCDD", 4);
  write_le<std::uint32_t>(os, kDistributionFormatVersion);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.dim()));
  write_le<std::uint32_t>(os, 0);
  for (double m : p.mass()) write_le<double>(os, m);
}

DenseDistribution read_distribution_binary(std::istream& is) {
  expect_magic(is, "HCDD");
  const auto version = read_le<std::uint32_t>(is);
  if (version != kDistributionFormatVersion) {
    throw Error("unsupported distribution format_version " + std::to_string(version));
  }
  const auto d = read_le<std::uint32_t>(is);
  (void)read_le<std::uint32_t>(is);
  if (d < 1 || d > static_cast<std::uint32_t>(kMaxDenseDim)) {
    throw DimensionError("distribution file has d=" + std::to_string(d));
  }
  std::vector<double> mass(std::size_t{1} << d);
  for (double& m : mass) m = read_le<double>(is);
  return DenseDistribution(static_cast<int>(d), std::move(mass));
}

void write_score_table(std::ostream& os, const ScoreTable& table) {
  os.write("HCST", 4);
  write_le<std::uint32_t>(os, kScoreTableFormatVersion);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(table.dim()));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(table.buckets().count()));
  for (double e : table.buckets().edges()) write_le<double>(os, e);
  for (double v : table.theta()) write_le<double>(os, v);
}

ScoreTable read_score_table(std::istream& is) {
  expect_magic(is, "HCST");
  const auto version = read_le<std::uint32_t>(is);
  if (version != kScoreTableFormatVersion) {
    throw Error("unsupported score table format_version " + std::to_string(version));
  }
  const auto d = read_le<std::uint32_t>(is);
  const auto B = read_le<std::uint32_t>(is);
  if (d < 1 || d > 20 || B < 1 || B > (1u << 20)) throw Error("corrupt score table header");
  std::vector<double> edges(B + 1);
  for (double& e : edges) e = read_le<double>(is);
  std::vector<double> theta(std::size_t{B} * (std::size_t{1} << d) * d);
  for (double& v : theta) v = read_le<double>(is);
  return ScoreTable(static_cast<int>(d), TimeBuckets(std::move(edges)), std::move(theta));
}

ScoreTable read_score_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open score table " + path.string());
  return read_score_table(in);
}

nlohmann::json score_table_metadata(const ScoreTable& table) {
  const auto edges = table.buckets().edges();
  return {{"format_version", kScoreTableFormatVersion},
          {"d", table.dim()},
          {"buckets", table.buckets().count()},
          {"bucket_edges", std::vector<double>(edges.begin(), edges.end())},
          {"layout", "theta[bucket][state][coordinate], f64 little-endian, theta = log score"}};
}

nlohmann::json to_json(const LossReport& report) {
  nlohmann::json j = {{"value", finite_or_null(report.value)},
                      {"flagged", report.flagged},
                      {"estimator", to_string(report.estimator)},
                      {"n_states_visited", report.n_states_visited},
                      {"n_time_points", report.time_points.size()},
                      {"n_infinite", report.n_infinite}};
  if (report.estimator == Estimator::monte_carlo) {
    j["n_samples"] = report.n_samples;
    j["seed"] = report.seed ? nlohmann::json(*report.seed) : nlohmann::json(nullptr);
  } else {
    j["kl_terminal"] = finite_or_null(report.kl_terminal);
    j["integral"] = finite_or_null(report.integral);
  }
  return j;
}

nlohmann::json to_json(const TrainReport& report) {
  nlohmann::json per_bucket = nlohmann::json::array();
  for (const auto& epoch : report.per_bucket_loss) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : epoch) row.push_back(finite_or_null(v));
    per_bucket.push_back(std::move(row));
  }
  return {{"final_dse", finite_or_null(report.final_dse)},
          {"iterations", report.iterations},
          {"learning_rates", report.learning_rates},
          {"seed", report.seed},
          {"n_pairs", report.n_pairs},
          {"epoch_loss", report.epoch_loss},
          {"per_bucket_loss", per_bucket},
          {"clamped_dse", finite_or_null(report.clamped_dse)},
          {"clamp_removed_mass", report.clamp_removed_mass}};
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_double failed");
  return std::string(buf.data(), end);
}

}  // namespace hcdiff
