/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fedsim/cli.hpp"
#include "fedsim/config.hpp"
#include "test_util.hpp"

namespace fedsim {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  ::unsetenv("FEDSIM_OUT");
  args.insert(args.begin(), "fedsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const ExperimentConfig& cfg) {
  const auto path = dir / "cfg.ini";
  std::ofstream(path) << serialize_config(cfg);
  return path;
}

TEST(Cli, MissingConfig) {
  const auto r = cli({"run", "missing.toml"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("missing.toml"), std::string::npos);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
}

TEST(Cli, CheckPassesOnTestbed) {
  const auto dir = testing::temp_dir("cli_check");
  auto cfg = testing::quad_config(10, 60);
  cfg.federation.theory_checks = true;
  cfg.sweep.strategies = {StrategyKind::kFedAvg, StrategyKind::kFedSoftMax};
  const auto r = cli({"check", write_config(dir, cfg).string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("theorem 1: PASS"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "o" / "check.csv"));
}

TEST(Cli, RunThenInspect) {
  const auto dir = testing::temp_dir("cli_run");
  auto cfg = testing::quad_config(5, 8);
  cfg.federation.theory_checks = true;
  const auto out = dir / "o";
  EXPECT_EQ(cli({"run", write_config(dir, cfg).string(), "--out", out.string(), "--quiet"}).code,
            kExitOk);
  for (const char* f : {"rounds.csv", "participation.csv", "clients.csv", "final_model.csv",
                        "theory.json", "manifest.json", "steps.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto r = cli({"inspect", out.string()});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_NE(r.out.find("log consistent"), std::string::npos);
}

TEST(Cli, SweepSingleSeed) {
  const auto dir = testing::temp_dir("cli_sweep");
  auto cfg = testing::blob_config(4, 6);
  cfg.sweep.strategies = {StrategyKind::kFedAvg, StrategyKind::kFedSoftMax};
  const auto out = dir / "o";
  const auto r = cli({"sweep", write_config(dir, cfg).string(), "--seeds", "1", "--out",
                      out.string(), "--quiet"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(out / "summary.csv");
  std::string header, row;
  std::getline(in, header);
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    std::vector<std::string> f;
    std::stringstream ss(row);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    // r90_mean, r90_lo, r90_hi
    EXPECT_EQ(f[3], f[4]);
    EXPECT_EQ(f[3], f[5]);
    EXPECT_EQ(f[0], "IID");
  }
  EXPECT_EQ(rows, 2);
  EXPECT_TRUE(fs::exists(out / "fedavg" / "seed_1" / "rounds.csv"));
}

TEST(Cli, SweepBytesIndependentOfWorkers) {
  const auto dir = testing::temp_dir("cli_workers");
  auto cfg = testing::blob_config(4, 5);
  cfg.sweep.strategies = {StrategyKind::kFedSoftMax};
  const auto path = write_config(dir, cfg).string();
  ASSERT_EQ(cli({"sweep", path, "--seeds", "3", "--workers", "1", "--out", (dir / "a").string(),
                 "--quiet"}).code, kExitOk);
  ASSERT_EQ(cli({"sweep", path, "--seeds", "3", "--workers", "3", "--out", (dir / "b").string(),
                 "--quiet"}).code, kExitOk);
  EXPECT_EQ(slurp(dir / "a" / "summary.csv"), slurp(dir / "b" / "summary.csv"));
  EXPECT_EQ(slurp(dir / "a" / "fedsoftmax" / "seed_3" / "rounds.csv"),
            slurp(dir / "b" / "fedsoftmax" / "seed_3" / "rounds.csv"));
}

TEST(Cli, EnvOverridesOut) {
  const auto dir = testing::temp_dir("cli_env");
  const auto path = write_config(dir, testing::quad_config(2, 2)).string();
  const char* argv[] = {"fedsim", "run", path.c_str(), "--out", "ignored", "--quiet"};
  ::setenv("FEDSIM_OUT", (dir / "env").c_str(), 1);
  std::ostringstream out, err;
  EXPECT_EQ(cli_main(6, argv, out, err), kExitOk);
  ::unsetenv("FEDSIM_OUT");
  EXPECT_TRUE(fs::exists(dir / "env" / "rounds.csv"));
  EXPECT_FALSE(fs::exists("ignored"));
}

}  // namespace
}  // namespace fedsim
