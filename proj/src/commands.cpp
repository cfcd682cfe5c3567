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

#include "hcdiff/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "hcdiff/errors.hpp"
#include "hcdiff/losses.hpp"
#include "hcdiff/oracle.hpp"
#include "hcdiff/presets.hpp"
#include "hcdiff/sampler.hpp"
#include "hcdiff/serialize.hpp"

namespace hcdiff {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kMaxOdeCheckDim = 12;
constexpr int kMaxMarginalDim = 10;

unsigned worker_count(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Files written by one command; removed again unless commit() is called.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_, ec);
      if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
      created_dir_ = true;
    } else if (!fs::is_directory(dir_)) {
      throw Error("output path " + dir_.string() + " is not a directory");
    }
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(dir_ / f, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  std::ofstream open(const std::string& name, bool binary = false) {
    files_.push_back(name);
    std::ofstream out(dir_ / name, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    return out;
  }

  void write_json(const std::string& name, const json& j) {
    auto out = open(name);
    out << j.dump(2) << '\n';
    close(out, name);
  }

  void close(std::ofstream& out, const std::string& name) {
    out.close();
    if (!out) throw Error("failed writing " + (dir_ / name).string());
  }

  void commit() { committed_ = true; }
  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json base_manifest(const std::string& command, const ExperimentConfig& cfg, const CommandOptions& options) {
  return json{{"tool", "hcdiff"},
              {"version", kVersion},
              {"command", command},
              {"config", config_to_json(cfg)},
              {"config_hash", config_hash(cfg)},
              {"seed", cfg.seed},
              {"workers", worker_count(options.workers)},
              {"profile", to_string(options.profile)}};
}

CommandResult finish(OutputSet& out, json manifest, const Timer& timer) {
  manifest["wall_time_seconds"] = timer.seconds();
  auto files = out.files();
  files.push_back("manifest.json");
  manifest["outputs"] = files;
  out.write_json("manifest.json", manifest);
  out.commit();
  CommandResult result;
  result.out_dir = out.dir();
  result.files = out.files();
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace

ExperimentConfig resolve_config(const CommandOptions& options) {
  ExperimentConfig cfg;
  if (options.config_path) cfg = load_config(*options.config_path);
  if (options.seed) cfg.seed = *options.seed;
  if (options.out_dir) {
    cfg.output_dir = options.out_dir->string();
  } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    cfg.output_dir = env;
  }
  cfg.validate();
  return cfg;
}

CommandResult cmd_evolve(const CommandOptions& options) {
  const Timer timer;
  const auto cfg = resolve_config(options);
  const auto p0 = make_data(cfg);
  const auto g = DenseDistribution::uniform(cfg.d);
  OutputSet out(cfg.output_dir);

  auto csv = out.open("evolve.csv");
  csv << "# schema: hcdiff.evolve/1\n";
  csv << "t,kl_to_uniform,tv_to_data,entropy,max_neighbor_ratio,ratio_bound\n";
  std::ofstream marginals;
  const bool write_marginals = cfg.d <= kMaxMarginalDim;
  if (write_marginals) {
    marginals = out.open("marginals.csv");
    marginals << "# schema: hcdiff.marginals/1\n";
    marginals << "t,state,mass\n";
  }
  for (double t : cfg.evolve_times) {
    const auto pt = evolve_exact(p0, t);
    const double bound = t > 0.0 ? score_envelope(t, GeneralEnvelope{}) : std::numeric_limits<double>::infinity();
    csv << format_double(t) << ',' << format_double(kl(pt, g)) << ',' << format_double(tv(pt, p0)) << ','
        << format_double(entropy(pt)) << ',' << format_double(max_neighbor_ratio(pt)) << ','
        << format_double(bound) << '\n';
    if (write_marginals) {
      for (std::size_t x = 0; x < pt.size(); ++x) {
        marginals << format_double(t) << ',' << x << ',' << format_double(pt[x]) << '\n';
      }
    }
  }
  out.close(csv, "evolve.csv");
  if (write_marginals) out.close(marginals, "marginals.csv");

  auto manifest = base_manifest("evolve", cfg, options);
  manifest["results"] = {{"kl_data_to_uniform", kl(p0, g)}};
  auto result = finish(out, std::move(manifest), timer);
  result.summary.push_back("evolve: " + std::to_string(cfg.evolve_times.size()) + " times written to " +
                           result.out_dir.string());
  return result;
}

CommandResult cmd_sample(const CommandOptions& options) {
  const Timer timer;
  const auto cfg = resolve_config(options);
  const auto scfg = cfg.sampler_config();
  const auto p0 = make_data(cfg);
  const auto raw = make_score(cfg, p0);
  const auto score = clamp_score(raw, scfg);
  const ReverseSampler sampler(scfg);
  OutputSet out(cfg.output_dir);

  const auto records = sample_batch(sampler, score, cfg.seed, cfg.n_samples, worker_count(options.workers));

  auto csv = out.open("samples.csv");
  csv << "# schema: hcdiff.samples/1\n";
  csv << "state,n_events,n_flips\n";
  double mean_events = 0.0;
  std::vector<std::uint64_t> states;
  states.reserve(records.size());
  for (const auto& r : records) {
    csv << r.state << ',' << r.n_events << ',' << r.n_flips << '\n';
    mean_events += static_cast<double>(r.n_events);
    states.push_back(r.state);
  }
  mean_events /= static_cast<double>(records.size());
  out.close(csv, "samples.csv");

  const auto& part = sampler.partition();
  const auto& sched = sampler.schedule();
  auto sc = out.open("schedule.csv");
  sc << "# schema: hcdiff.schedule/1\n";
  sc << "k,t_start,t_end,lambda\n";
  for (std::size_t k = 0; k < part.intervals(); ++k) {
    sc << k << ',' << format_double(part.times[k]) << ',' << format_double(part.times[k + 1]) << ','
       << format_double(sched.lambdas[k]) << '\n';
  }
  out.close(sc, "schedule.csv");

  json results{{"total_mass", sched.total_mass},
               {"n_intervals", part.intervals()},
               {"mean_events", mean_events},
               {"bounded_tail", part.bounded_tail}};
  const auto empirical = DenseDistribution::from_samples(cfg.d, states);
  results["tv_to_p_delta"] = tv(empirical, evolve_exact(p0, cfg.delta));
  if (cfg.oracle.ode_check && cfg.d <= kMaxOdeCheckDim) {
    const auto ode = oracle::reverse_marginal(score, DenseDistribution::uniform(cfg.d), cfg.T, cfg.delta,
                                              cfg.oracle.steps_per_unit);
    results["tv_to_ode_marginal"] = tv(empirical, ode.to_distribution(cfg.d));
    results["ode_mass_drift"] = ode.mass_drift;
  }
  auto manifest = base_manifest("sample", cfg, options);
  manifest["results"] = results;
  auto result = finish(out, std::move(manifest), timer);
  result.summary.push_back("sample: " + std::to_string(records.size()) + " trajectories, total_mass " +
                           format_double(sched.total_mass) + ", written to " + result.out_dir.string());
  return result;
}

CommandResult cmd_train(const CommandOptions& options) {
  const Timer timer;
  const auto cfg = resolve_config(options);
  const auto p0 = make_data(cfg);
  OutputSet out(cfg.output_dir);

  auto [table, report] = train_tabular(presets::sampler_for(p0), cfg.train_config(), cfg.train.n_pairs,
                                       cfg.train.sgd, cfg.seed);

  auto bin = out.open("score_table.hcst", true);
  write_score_table(bin, table);
  out.close(bin, "score_table.hcst");
  out.write_json("score_table.json", score_table_metadata(table));
  out.write_json("train_report.json", to_json(report));

  auto csv = out.open("train_loss.csv");
  csv << "# schema: hcdiff.train_loss/1\n";
  csv << "epoch,learning_rate,dse\n";
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    csv << e << ',' << format_double(report.learning_rates[e]) << ',' << format_double(report.epoch_loss[e])
        << '\n';
  }
  out.close(csv, "train_loss.csv");

  const auto learned = table_as_score_fn(table);
  const auto g = DenseDistribution::uniform(cfg.d);
  json results{{"final_dse", report.final_dse},
               {"dse_exact_score", dse_estimate(generate_dse_pairs(presets::sampler_for(p0), cfg.train_config(),
                                                                   cfg.train.n_pairs, cfg.seed),
                                                exact_score_fn(p0))
                                       .value},
               {"path_kl", path_kl(p0, learned, cfg.T, cfg.delta, g, cfg.n_quad).value},
               {"clamped_dse", report.clamped_dse},
               {"clamp_removed_mass", report.clamp_removed_mass}};
  auto manifest = base_manifest("train", cfg, options);
  manifest["results"] = results;
  auto result = finish(out, std::move(manifest), timer);
  result.summary.push_back("train: final DSE " + format_double(report.final_dse) + " after " +
                           std::to_string(report.iterations) + " steps, written to " + result.out_dir.string());
  return result;
}

CommandResult cmd_loss(const CommandOptions& options) {
  const Timer timer;
  const auto cfg = resolve_config(options);
  const auto p0 = make_data(cfg);
  const auto score = make_score(cfg, p0);
  const auto g = DenseDistribution::uniform(cfg.d);
  OutputSet out(cfg.output_dir);

  auto report = path_kl(p0, score, cfg.T, cfg.delta, g, cfg.n_quad);
  report.seed = cfg.seed;
  auto j = to_json(report);
  j["epsilon_uniform_time"] = average_bregman(p0, score, cfg.T, cfg.delta, TimeWeighting::uniform, cfg.n_quad);
  j["epsilon_log_uniform_time"] =
      cfg.delta > 0.0 ? json(average_bregman(p0, score, cfg.T, cfg.delta, TimeWeighting::log_uniform, cfg.n_quad))
                      : json(nullptr);
  j["kl_terminal_to_uniform"] = kl(evolve_exact(p0, cfg.T), g);
  out.write_json("loss_report.json", j);

  auto manifest = base_manifest("loss", cfg, options);
  manifest["results"] = {{"path_kl", report.value}, {"flagged", report.flagged}};
  auto result = finish(out, std::move(manifest), timer);
  result.summary.push_back("loss: path KL " + format_double(report.value) + " (terminal KL " +
                           format_double(report.kl_terminal) + "), written to " + result.out_dir.string());
  return result;
}

CommandResult cmd_verify(const CommandOptions& options) {
  const Timer timer;
  const auto cfg = resolve_config(options);
  VerifyOptions vopt;
  vopt.profile = options.profile;
  if (options.seed) vopt.seed = *options.seed;
  vopt.workers = worker_count(options.workers);
  OutputSet out(cfg.output_dir);

  const auto results = run_acceptance(vopt);
  json list = json::array();
  CommandResult summary_holder;
  int failed = 0;
  for (const auto& r : results) {
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    list.push_back({{"id", r.id},
                    {"title", r.title},
                    {"passed", r.passed},
                    {"detail", r.detail},
                    {"seconds", r.seconds},
                    {"metrics", metrics}});
    failed += r.passed ? 0 : 1;
    summary_holder.summary.push_back(format_result(r));
  }
  out.write_json("verify_report.json", json{{"profile", to_string(vopt.profile)},
                                            {"seed", vopt.seed},
                                            {"passed", failed == 0},
                                            {"criteria", list}});

  auto manifest = base_manifest("verify", cfg, options);
  manifest["seed"] = vopt.seed;
  manifest["results"] = {{"passed", results.size() - failed}, {"failed", failed}};
  auto result = finish(out, std::move(manifest), timer);
  result.summary = std::move(summary_holder.summary);
  result.summary.push_back(std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) +
                           " criteria passed");
  result.exit_code = failed == 0 ? 0 : 1;
  return result;
}

}  // namespace hcdiff
