// Copyright 2026 The tapreid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tapreid/cli/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace tapreid {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tapreid_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    std::ofstream(dir_ / "pop.json")
        << R"({"seed": 11, "commuter": 15, "touristOneWeek": 10, "seasonPassHolder": 8,
               "childConcession": 4, "parliamentarian": 1, "policePass": 2,
               "stopUniverse": 120, "startDate": "2017-03-06", "endDate": "2017-03-26"})";
    ASSERT_EQ(Cli({"synth", "--config", Path("pop.json"), "--out", Path("data.csv")}).code, 0);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SynthIsReproducible) {
  ASSERT_EQ(Cli({"--threads", "3", "synth", "--config", Path("pop.json"), "--out",
                 Path("again.csv")})
                .code,
            0);
  EXPECT_EQ(Slurp(Path("data.csv")), Slurp(Path("again.csv")));
  EXPECT_TRUE(absl::StartsWith(Slurp(Path("data.csv")), "cardId,"));
}

TEST_F(CliTest, UnicityReportHasTenRows) {
  CliRun r = Cli({"unicity", "--in", Path("data.csv"), "--granularity", "zeroSeconds", "--n",
               "1..5", "--location", "both", "--seed", "7", "--out", Path("report.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines =
      absl::StrSplit(Slurp(Path("report.csv")), '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[0], "granularity,location,n,cardsConsidered,cardsUnique,percentUnique");
  CliRun json = Cli({"unicity", "--in", Path("data.csv"), "--granularity", "zeroSeconds",
                  "--format", "json"});
  EXPECT_EQ(nlohmann::json::parse(json.out)["rows"].size(), 10u);
}

TEST_F(CliTest, EmptyQueryCountsAllCards) {
  std::ofstream(dir_ / "q.json") << "";
  CliRun r = Cli({"query", "--in", Path("data.csv"), "--constraints", Path("q.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["total"], 15 + 10 + 8 + 4 + 1 + 2);
  CliRun csv = Cli({"query", "--in", Path("data.csv"), "--constraints", Path("q.json"),
                 "--format", "csv"});
  std::vector<std::string> lines = absl::StrSplit(csv.out, '\n', absl::SkipEmpty());
  EXPECT_EQ(lines.size(), 1u + 40);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"unicity"}).code, kExitUsage);
  EXPECT_EQ(Cli({"unicity", "--in", Path("data.csv"), "--n", "0"}).code, kExitUsage);
  EXPECT_EQ(Cli({"release", "--in", Path("data.csv"), "--block", "7"}).code, kExitUsage);
  EXPECT_EQ(Cli({"release", "--in", Path("data.csv"), "--epsilon", "0"}).code, kExitUsage);
  EXPECT_EQ(Cli({"audit", "gaps", "--in", Path("data.csv"), "--min-gap", "0"}).code,
            kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  CliRun missing = Cli({"unicity", "--in", Path("absent.csv")});
  EXPECT_EQ(missing.code, kExitRuntimeError);
  EXPECT_TRUE(absl::StrContains(missing.err, "UnreadableSource"));
  CliRun unknown = Cli({"cotravel", "--in", Path("data.csv"), "--card", "999999"});
  EXPECT_EQ(unknown.code, kExitRuntimeError);
  EXPECT_TRUE(absl::StrContains(unknown.err, "UnknownCard"));
  EXPECT_EQ(Cli({"serve", "--data", Path("data.csv"), "--bind", "nonsense:x"}).code,
            kExitUsage);
  EXPECT_EQ(Cli({"serve"}).code, kExitUsage);
}

TEST_F(CliTest, IngestNormalizesAndReportsErrors) {
  std::string data = Slurp(Path("data.csv"));
  std::ofstream(dir_ / "dirty.csv") << data << "not,a,valid,row\n";
  CliRun r = Cli({"ingest", "--in", Path("dirty.csv"), "--out", Path("clean.csv"), "--errors",
               Path("errors.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Slurp(Path("clean.csv")), data);
  std::vector<std::string> errors =
      absl::StrSplit(Slurp(Path("errors.csv")), '\n', absl::SkipEmpty());
  EXPECT_EQ(errors.size(), 2u);
  EXPECT_TRUE(absl::StrContains(r.err, "rejected 1 rows"));
}

TEST_F(CliTest, ReleaseWritesMetadataWithoutSeed) {
  CliRun r = Cli({"release", "--in", Path("data.csv"), "--from", "2017-03-06", "--to",
               "2017-03-06", "--seed", "123456789", "--post-process", "roundAndClampToZero",
               "--metadata", Path("meta.json"), "--out", Path("counts.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string meta = Slurp(Path("meta.json"));
  EXPECT_FALSE(absl::StrContains(meta, "123456789"));
  EXPECT_TRUE(absl::StrContains(meta, "\"epsilon\""));
  EXPECT_TRUE(absl::StartsWith(Slurp(Path("counts.csv")), "stopId,blockStart,direction,count\n"));
}

TEST_F(CliTest, EverySubcommandIsDeterministicAcrossRunsAndThreads) {
  std::ofstream(dir_ / "q.json")
      << R"([{"kind":"touchOnBetween","date":"2017-03-07","lo":"07:00:00","hi":"10:00:00"}])";
  const std::vector<std::vector<std::string>> commands = {
      {"synth", "--config", Path("pop.json")},
      {"ingest", "--in", Path("data.csv")},
      {"unicity", "--in", Path("data.csv"), "--seed", "5"},
      {"cotravel", "--in", Path("data.csv"), "--card", "1", "--window", "600"},
      {"query", "--in", Path("data.csv"), "--constraints", Path("q.json")},
      {"audit", "gaps", "--in", Path("data.csv")},
      {"audit", "types", "--in", Path("data.csv")},
      {"release", "--in", Path("data.csv"), "--seed", "3", "--to", "2017-03-08"},
  };
  for (const auto& command : commands) {
    std::vector<std::string> single = {"--threads", "1"};
    single.insert(single.end(), command.begin(), command.end());
    std::vector<std::string> many = {"--threads", "4"};
    many.insert(many.end(), command.begin(), command.end());
    CliRun a = Cli(single), b = Cli(single), c = Cli(many);
    ASSERT_EQ(a.code, 0) << command[0] << ": " << a.err;
    EXPECT_FALSE(a.out.empty()) << command[0];
    EXPECT_EQ(a.out, b.out) << command[0];
    EXPECT_EQ(a.out, c.out) << command[0];
  }
}

}  // namespace
}  // namespace tapreid
