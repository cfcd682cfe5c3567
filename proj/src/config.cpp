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

#include "hcdiff/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "hcdiff/errors.hpp"
#include "hcdiff/presets.hpp"
#include "hcdiff/serialize.hpp"

namespace hcdiff {

namespace {

using nlohmann::json;

// Reads keys out of one JSON object, rejecting anything not consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = read<T>(j_.at(key));
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  template <typename T>
  static T read(const json& v) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("expected an integer");
      if (std::is_unsigned_v<T> && !v.is_number_unsigned()) throw ConfigError("expected a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("expected a number");
      return v.get<T>();
    } else {
      return v.get<T>();
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

SamplerConfig ExperimentConfig::sampler_config() const {
  SamplerConfig s;
  s.d = d;
  s.T = T;
  s.delta = delta;
  s.c = c;
  s.C = C;
  if (mode == "bounded") s.mode = BoundedEnvelope{L};
  s.seed = seed;
  s.n_samples = n_samples;
  return s;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.d = d;
  t.T = T;
  t.delta = delta;
  t.buckets = train.buckets;
  return t;
}

void ExperimentConfig::validate() const {
  if (d < 1 || d > kMaxDenseDim) throw ConfigError("d must be in [1, 24]");
  if (mode != "general" && mode != "bounded") throw ConfigError("mode must be 'general' or 'bounded'");
  try {
    sampler_config().validate();
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
  static const std::set<std::string> presets{"point-mass", "product-bernoulli", "random-dirichlet", "two-mode",
                                             "bounded-ratio"};
  if (!presets.count(data.preset)) throw ConfigError("data.preset: unknown preset '" + data.preset + "'");
  if (data.preset == "point-mass" && d < 64 && data.state >> d) throw ConfigError("data.state out of range");
  if (!(data.q >= 0.0 && data.q <= 1.0)) throw ConfigError("data.q must be in [0, 1]");
  if (!(data.alpha > 0.0)) throw ConfigError("data.alpha must be positive");
  if (!(data.beta >= 0.0)) throw ConfigError("data.beta must be non-negative");
  if (!(data.L >= 1.0) || !std::isfinite(data.L)) throw ConfigError("data.L must be finite and >= 1");
  if (score.source != "exact" && score.source != "table-file" && score.source != "perturbed") {
    throw ConfigError("score.source must be exact, table-file or perturbed");
  }
  if (score.source == "table-file" && score.path.empty()) throw ConfigError("score.path is required for table-file");
  if (!(score.sigma >= 0.0)) throw ConfigError("score.sigma must be non-negative");
  if (score.buckets == 0) throw ConfigError("score.buckets must be positive");
  if (score.source == "perturbed" && d > 16) throw ConfigError("perturbed scores support d <= 16");
  if (train.n_pairs == 0 || train.buckets == 0) throw ConfigError("train.n_pairs and train.buckets must be positive");
  if (!(train.sgd.learning_rate > 0.0) || !(train.sgd.final_learning_rate > 0.0) || train.sgd.epochs == 0 ||
      train.sgd.batch_size == 0) {
    throw ConfigError("train: learning rates, epochs and batch_size must be positive");
  }
  if (n_samples == 0) throw ConfigError("n_samples must be positive");
  if (n_quad < 3) throw ConfigError("n_quad must be at least 3");
  if (oracle.steps_per_unit == 0) throw ConfigError("oracle.steps_per_unit must be positive");
  for (double t : evolve_times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("evolve.times must be finite and >= 0");
  }
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

ExperimentConfig config_from_json(const json& input) {
  const json* root = &input;
  if (input.is_object() && input.contains("tool") && input.contains("config")) root = &input.at("config");

  ExperimentConfig cfg;
  ObjectReader r(*root, "config");
  int version = kConfigSchemaVersion;
  r.get("schema_version", version);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("config: unsupported schema_version " + std::to_string(version));
  }
  r.get("d", cfg.d);
  r.get("T", cfg.T);
  r.get("delta", cfg.delta);
  r.get("c", cfg.c);
  r.get("C", cfg.C);
  r.get("seed", cfg.seed);
  r.get("n_samples", cfg.n_samples);
  r.get("n_quad", cfg.n_quad);
  if (const json* m = r.child("mode")) {
    ObjectReader mr(*m, "config.mode");
    mr.get("kind", cfg.mode);
    mr.get("L", cfg.L);
    mr.finish();
  }
  if (const json* dj = r.child("data")) {
    ObjectReader dr(*dj, "config.data");
    dr.get("preset", cfg.data.preset);
    dr.get("state", cfg.data.state);
    dr.get("q", cfg.data.q);
    dr.get("alpha", cfg.data.alpha);
    dr.get("beta", cfg.data.beta);
    dr.get("L", cfg.data.L);
    dr.get("seed", cfg.data.seed);
    dr.finish();
  }
  if (const json* sj = r.child("score")) {
    ObjectReader sr(*sj, "config.score");
    sr.get("source", cfg.score.source);
    sr.get("path", cfg.score.path);
    sr.get("sigma", cfg.score.sigma);
    sr.get("seed", cfg.score.seed);
    sr.get("buckets", cfg.score.buckets);
    sr.finish();
  }
  if (const json* tj = r.child("train")) {
    ObjectReader tr(*tj, "config.train");
    tr.get("n_pairs", cfg.train.n_pairs);
    tr.get("buckets", cfg.train.buckets);
    tr.get("learning_rate", cfg.train.sgd.learning_rate);
    tr.get("final_learning_rate", cfg.train.sgd.final_learning_rate);
    tr.get("epochs", cfg.train.sgd.epochs);
    tr.get("batch_size", cfg.train.sgd.batch_size);
    tr.finish();
  }
  if (const json* oj = r.child("oracle")) {
    ObjectReader orr(*oj, "config.oracle");
    orr.get("ode_check", cfg.oracle.ode_check);
    orr.get("steps_per_unit", cfg.oracle.steps_per_unit);
    orr.finish();
  }
  if (const json* ej = r.child("evolve")) {
    ObjectReader er(*ej, "config.evolve");
    er.get("times", cfg.evolve_times);
    er.finish();
  }
  if (const json* oj = r.child("output")) {
    ObjectReader orr(*oj, "config.output");
    orr.get("dir", cfg.output_dir);
    orr.finish();
  }
  r.finish();
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& c) {
  return json{
      {"schema_version", kConfigSchemaVersion},
      {"d", c.d},
      {"T", c.T},
      {"delta", c.delta},
      {"c", c.c},
      {"C", c.C},
      {"seed", c.seed},
      {"n_samples", c.n_samples},
      {"n_quad", c.n_quad},
      {"mode", {{"kind", c.mode}, {"L", c.L}}},
      {"data",
       {{"preset", c.data.preset},
        {"state", c.data.state},
        {"q", c.data.q},
        {"alpha", c.data.alpha},
        {"beta", c.data.beta},
        {"L", c.data.L},
        {"seed", c.data.seed}}},
      {"score",
       {{"source", c.score.source},
        {"path", c.score.path},
        {"sigma", c.score.sigma},
        {"seed", c.score.seed},
        {"buckets", c.score.buckets}}},
      {"train",
       {{"n_pairs", c.train.n_pairs},
        {"buckets", c.train.buckets},
        {"learning_rate", c.train.sgd.learning_rate},
        {"final_learning_rate", c.train.sgd.final_learning_rate},
        {"epochs", c.train.sgd.epochs},
        {"batch_size", c.train.sgd.batch_size}}},
      {"oracle", {{"ode_check", c.oracle.ode_check}, {"steps_per_unit", c.oracle.steps_per_unit}}},
      {"evolve", {{"times", c.evolve_times}}},
      {"output", {{"dir", c.output_dir}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_hash(const ExperimentConfig& config) {
  // Hash excludes the output section.
  auto j = config_to_json(config);
  j.erase("output");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DenseDistribution make_data(const ExperimentConfig& c) {
  const auto& s = c.data;
  if (s.preset == "point-mass") return presets::point_mass(c.d, s.state);
  if (s.preset == "product-bernoulli") return presets::product_bernoulli(c.d, s.q);
  if (s.preset == "random-dirichlet") return presets::random_dirichlet(c.d, s.alpha, s.seed);
  if (s.preset == "two-mode") return presets::two_mode(c.d, s.beta);
  if (s.preset == "bounded-ratio") return presets::bounded_ratio(c.d, s.L, s.seed);
  throw ConfigError("unknown data preset '" + s.preset + "'");
}

ScoreFn make_score(const ExperimentConfig& c, const DenseDistribution& p0) {
  if (c.score.source == "exact") return exact_score_fn(p0);
  if (c.score.source == "perturbed") {
    return perturb_score(exact_score_fn(p0), c.score.sigma, c.score.seed,
                         TimeBuckets::geometric(c.delta, c.T, c.score.buckets));
  }
  const ScoreTable table = read_score_table(std::filesystem::path(c.score.path));
  if (table.dim() != c.d) {
    throw ConfigError("score table " + c.score.path + " has d=" + std::to_string(table.dim()) +
                      ", config has d=" + std::to_string(c.d));
  }
  if (table.buckets().lo() > c.delta || table.buckets().hi() < c.T) {
    throw ConfigError("score table " + c.score.path + " covers [" + format_double(table.buckets().lo()) + ", " +
                      format_double(table.buckets().hi()) + "], which does not contain [delta, T]");
  }
  return table_as_score_fn(table);
}

}  // namespace hcdiff
