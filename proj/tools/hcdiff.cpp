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

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "hcdiff/commands.hpp"
#include "hcdiff/errors.hpp"
#include "hcdiff/score_train.hpp"
#include "hcdiff/serialize.hpp"

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  unsigned workers = 0;
  std::string profile = "full";
};

void add_common(CLI::App* sub, Flags& f, bool config_required) {
  auto* opt = sub->add_option("--config", f.config, "Experiment config (JSON) or a previous run's manifest.json");
  if (config_required) {
    opt->required()->check(CLI::ExistingFile);
  } else {
    opt->check(CLI::ExistingFile);
  }
  sub->add_option("--seed", f.seed, "Override the config seed");
  sub->add_option("--out", f.out, "Output directory (overrides HCDIFF_OUT_DIR and the config)");
  sub->add_option("--workers", f.workers, "Worker threads; 0 uses all cores")->capture_default_str();
  sub->add_option("--profile", f.profile, "Verification profile")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
}

hcdiff::CommandOptions to_options(const Flags& f, const CLI::App* sub) {
  hcdiff::CommandOptions o;
  if (!f.config.empty()) o.config_path = f.config;
  if (sub->count("--seed") > 0) o.seed = f.seed;
  if (!f.out.empty()) o.out_dir = f.out;
  o.workers = f.workers;
  o.profile = hcdiff::parse_profile(f.profile);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hcdiff: score-based discrete diffusion on the hypercube {0,1}^d"};
  app.set_version_flag("--version", hcdiff::kVersion);
  app.require_subcommand(1);

  using Command = std::function<hcdiff::CommandResult(const hcdiff::CommandOptions&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"evolve", {"Forward marginals p(t) with KL, TV and ratio diagnostics", hcdiff::cmd_evolve}},
      {"sample", {"Reverse sampling by uniformization; writes samples.csv", hcdiff::cmd_sample}},
      {"train", {"Tabular DSE training; writes score_table.hcst", hcdiff::cmd_train}},
      {"loss", {"Path KL and time-averaged Bregman loss of the configured score", hcdiff::cmd_loss}},
      {"verify", {"Run the acceptance suite and print a pass/fail table", hcdiff::cmd_verify}},
  };
  std::map<std::string, Flags> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    add_common(sub, flags[name], name != "verify");
    subs[name] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      const auto result = commands.at(name).second(to_options(flags[name], sub));
      for (const auto& line : result.summary) std::printf("%s\n", line.c_str());
      return result.exit_code;
    } catch (const hcdiff::TrainingError& e) {
      std::fprintf(stderr, "hcdiff %s: %s\n%s\n", name.c_str(), e.what(),
                   hcdiff::to_json(e.report()).dump(2).c_str());
      return 3;
    } catch (const hcdiff::ConfigError& e) {
      std::fprintf(stderr, "hcdiff %s: config error: %s\n", name.c_str(), e.what());
      return 2;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "hcdiff %s: %s\n", name.c_str(), e.what());
      return 1;
    }
  }
  return EXIT_FAILURE;
}
