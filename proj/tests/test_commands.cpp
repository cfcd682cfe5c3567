#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hcdiff/commands.hpp"
#include "hcdiff/errors.hpp"

using namespace hcdiff;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hcdiff_test_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CommandOptions options_for(const fs::path& config, const fs::path& out) {
  CommandOptions o;
  o.config_path = config;
  o.out_dir = out;
  o.workers = 2;
  return o;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto cfg = config_from_json(json::parse(R"({"d": 5, "mode": {"kind": "bounded", "L": 2.5}, "delta": 0})"));
  CHECK(cfg.d == 5);
  CHECK(cfg.mode == "bounded");
  CHECK(std::holds_alternative<BoundedEnvelope>(cfg.sampler_config().mode));

  CHECK_THROWS_AS(config_from_json(json::parse(R"({"dd": 5})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"data": {"preset": "point-mass", "x": 1}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"d": 2.5})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"seed": -1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"delta": 0})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"d": 30})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"schema_version": 2})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"score": {"source": "table-file"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"([1, 2])")), ConfigError);

  // The resolved form parses back to the same config.
  const auto again = config_from_json(config_to_json(cfg));
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(config_hash(config_from_json(json::parse(R"({"d": 6})"))) != config_hash(cfg));
}

TEST_CASE("sample is deterministic and reproducible from its manifest") {
  TempDir tmp;
  const auto config = write_file(tmp.path / "c.json", R"({"d": 4, "n_samples": 3000, "seed": 9,
      "data": {"preset": "point-mass"}})");
  const auto a = cmd_sample(options_for(config, tmp.path / "a"));
  auto serial = options_for(config, tmp.path / "b");
  serial.workers = 1;
  cmd_sample(serial);
  const auto samples = read_file(tmp.path / "a" / "samples.csv");
  CHECK(samples == read_file(tmp.path / "b" / "samples.csv"));
  CHECK(samples.rfind("# schema: hcdiff.samples/1\nstate,n_events,n_flips\n", 0) == 0);
  CHECK(a.manifest.at("config_hash") == cmd_sample(options_for(config, tmp.path / "a2")).manifest.at("config_hash"));

  // Rerun from the manifest alone.
  cmd_sample(options_for(tmp.path / "a" / "manifest.json", tmp.path / "c"));
  CHECK(read_file(tmp.path / "c" / "samples.csv") == samples);

  auto reseeded = options_for(config, tmp.path / "d");
  reseeded.seed = 10;
  cmd_sample(reseeded);
  CHECK(read_file(tmp.path / "d" / "samples.csv") != samples);

  const auto m = json::parse(read_file(tmp.path / "a" / "manifest.json"));
  CHECK(m.at("tool") == "hcdiff");
  CHECK(m.at("seed") == 9);
  CHECK(m.at("results").at("tv_to_ode_marginal").get<double>() < 0.05);
}

TEST_CASE("output directory override from the environment") {
  TempDir tmp;
  const auto config = write_file(tmp.path / "c.json", R"({"d": 3, "output": {"dir": "unused"}})");
  const auto env_dir = (tmp.path / "from_env").string();
  setenv(kOutDirEnv, env_dir.c_str(), 1);
  CommandOptions o;
  o.config_path = config;
  const auto r = cmd_evolve(o);
  CHECK(r.out_dir == fs::path(env_dir));
  CHECK(fs::exists(tmp.path / "from_env" / "evolve.csv"));
  o.out_dir = tmp.path / "flag";
  CHECK(cmd_evolve(o).out_dir == tmp.path / "flag");
  unsetenv(kOutDirEnv);
}

TEST_CASE("failed runs leave no partial outputs") {
  TempDir tmp;
  // Sampling succeeds, then the ODE check meets a zero-mass state at t = 0.
  const auto config = write_file(tmp.path / "c.json", R"({"d": 3, "T": 2.0, "delta": 0,
      "mode": {"kind": "bounded", "L": 3.0}, "n_samples": 100, "data": {"preset": "point-mass"}})");
  CHECK_THROWS_AS(cmd_sample(options_for(config, tmp.path / "out")), ZeroMassError);
  CHECK_FALSE(fs::exists(tmp.path / "out"));

  fs::create_directories(tmp.path / "keep");
  write_file(tmp.path / "keep" / "other.txt", "x");
  CHECK_THROWS(cmd_sample(options_for(config, tmp.path / "keep")));
  CHECK(fs::exists(tmp.path / "keep" / "other.txt"));
  CHECK_FALSE(fs::exists(tmp.path / "keep" / "samples.csv"));
}

TEST_CASE("loss with the exact score is the terminal KL") {
  TempDir tmp;
  const auto config = write_file(tmp.path / "c.json", R"({"d": 4, "T": 3.0,
      "data": {"preset": "random-dirichlet", "alpha": 0.5, "seed": 3}})");
  const auto r = cmd_loss(options_for(config, tmp.path / "out"));
  const auto report = json::parse(read_file(tmp.path / "out" / "loss_report.json"));
  CHECK(report.at("value").get<double>() ==
        doctest::Approx(report.at("kl_terminal_to_uniform").get<double>()).epsilon(1e-10));
  CHECK(report.at("epsilon_uniform_time").get<double>() < 1e-12);
  CHECK(r.manifest.at("command") == "loss");
}

TEST_CASE("train then sample with the trained table") {
  TempDir tmp;
  const auto train_cfg = write_file(tmp.path / "t.json", R"({"d": 3, "T": 4.0, "delta": 0.05, "seed": 2,
      "data": {"preset": "point-mass"}, "train": {"n_pairs": 20000, "epochs": 10}})");
  cmd_train(options_for(train_cfg, tmp.path / "train"));
  for (const char* f : {"score_table.hcst", "score_table.json", "train_report.json", "train_loss.csv",
                        "manifest.json"}) {
    CHECK(fs::exists(tmp.path / "train" / f));
  }
  const auto table = (tmp.path / "train" / "score_table.hcst").string();
  const auto sample_cfg = write_file(tmp.path / "s.json", R"({"d": 3, "T": 4.0, "delta": 0.05, "n_samples": 5000,
      "data": {"preset": "point-mass"}, "score": {"source": "table-file", "path": ")" + table + R"("}})");
  const auto r = cmd_sample(options_for(sample_cfg, tmp.path / "sample"));
  CHECK(r.manifest.at("results").at("tv_to_p_delta").get<double>() < 0.15);

  const auto wide = write_file(tmp.path / "w.json", R"({"d": 3, "T": 8.0, "delta": 0.05,
      "score": {"source": "table-file", "path": ")" + table + R"("}})");
  CHECK_THROWS_AS(cmd_sample(options_for(wide, tmp.path / "wide")), ConfigError);
}

TEST_CASE("evolve writes the sweep") {
  TempDir tmp;
  const auto config = write_file(tmp.path / "c.json", R"({"d": 2, "evolve": {"times": [0, 1]}})");
  cmd_evolve(options_for(config, tmp.path / "out"));
  std::istringstream lines(read_file(tmp.path / "out" / "evolve.csv"));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "# schema: hcdiff.evolve/1");
  std::getline(lines, line);
  CHECK(line == "t,kl_to_uniform,tv_to_data,entropy,max_neighbor_ratio,ratio_bound");
  std::getline(lines, line);
  CHECK(line == "0,1.3862943611198906,0,0,inf,inf");
}
