// Copyright 2026 The ctsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "ctsynth/table_io.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace ctsynth {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using ::testing::StartsWith;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ =
        fs::temp_directory_path() /
        ("ctsynth_cli_" +
         std::string(
             ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  void Write(const std::string& name, const std::string& text) const {
    std::ofstream(Path(name), std::ios::binary) << text;
  }

  std::string Read(const std::string& name) const {
    return *ReadFile(Path(name));
  }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }

  void WriteMicrodata() {
    Write("micro.csv",
          "sex,age,region\n"
          "F,young,north\nM,old,south\nF,old,north\nF,young,north\n"
          "M,young,south\nM,old,north\nF,old,south\nF,young,south\n");
    Write("schema.json",
          R"({"variables": [)"
          R"({"name": "sex", "categories": ["F", "M"]},)"
          R"({"name": "age", "categories": ["young", "old"]},)"
          R"({"name": "region", "categories": ["north", "south", "east"]}]})");
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), kExitOk);
  EXPECT_EQ(ExitCodeFor(absl::InvalidArgumentError("x")), kExitValidation);
  EXPECT_EQ(ExitCodeFor(absl::OutOfRangeError("x")), kExitValidation);
  EXPECT_EQ(ExitCodeFor(absl::NotFoundError("x")), kExitIo);
  EXPECT_EQ(ExitCodeFor(absl::UnavailableError("x")), kExitIo);
}

TEST(HashHexTest, Fnv1a) {
  EXPECT_EQ(HashHex(""), "cbf29ce484222325");
  EXPECT_EQ(HashHex("a"), "af63dc4c8601ec8c");
}

TEST_F(CliTest, VersionAndUnknownCommand) {
  EXPECT_EQ(Run({"--version"}), 0);
  EXPECT_THAT(out_.str(), HasSubstr("0.1.0"));
  EXPECT_EQ(Run({"frobnicate"}), kExitValidation);
  EXPECT_EQ(Run({}), kExitValidation);
}

TEST_F(CliTest, TabulateWritesTableAndSidecar) {
  WriteMicrodata();
  ASSERT_EQ(Run({"tabulate", "--input", Path("micro.csv"), "--schema",
                 Path("schema.json"), "--output", Path("t.csv")}),
            0)
      << err_.str();
  const std::string t = Read("t.csv");
  EXPECT_THAT(t, HasSubstr("sex,age,region,count\nF,young,north,2\n"));
  EXPECT_THAT(t, HasSubstr("M,old,east,0\n"));
  EXPECT_THAT(t, HasSubstr("# tool: ctsynth 0.1.0"));
  EXPECT_TRUE(fs::exists(Path("t.csv.schema.json")));
}

TEST_F(CliTest, TabulateEmptyMicrodataWithSchemaGivesZeros) {
  WriteMicrodata();
  Write("empty.csv", "sex,age,region\n");
  ASSERT_EQ(Run({"tabulate", "--input", Path("empty.csv"), "--schema",
                 Path("schema.json"), "--output", Path("t.csv")}),
            0)
      << err_.str();
  auto schema = SchemaFromJson(Read("schema.json"));
  auto table = ParseTable(Read("t.csv"), *schema, ',');
  ASSERT_TRUE(table.ok()) << table.status();
  EXPECT_EQ(table->n(), 0u);
  EXPECT_EQ(table->num_cells(), 12u);
}

TEST_F(CliTest, SynthesizeIsByteIdenticalAndThreadIndependent) {
  WriteMicrodata();
  ASSERT_EQ(Run({"tabulate", "--input", Path("micro.csv"), "--schema",
                 Path("schema.json"), "--output", Path("t.csv")}),
            0);
  const std::vector<std::string> base = {
      "synthesize", "--input", Path("t.csv"), "--alpha", "0.5", "--seed", "11"};
  auto with = [&](std::vector<std::string> extra, const std::string& out) {
    std::vector<std::string> args = extra;
    args.insert(args.end(), base.begin(), base.end());
    args.push_back("--output");
    args.push_back(Path(out));
    return Run(args);
  };
  ASSERT_EQ(with({"--threads", "1"}, "a.csv"), 0) << err_.str();
  ASSERT_EQ(with({"--threads", "1"}, "b.csv"), 0);
  ASSERT_EQ(with({"--threads", "4"}, "c.csv"), 0);
  EXPECT_EQ(Read("a.csv"), Read("b.csv"));
  EXPECT_EQ(Read("a.csv"), Read("c.csv"));
  EXPECT_THAT(Read("a.csv"), HasSubstr("# seed: 11"));
  ASSERT_EQ(with({}, "d.csv"), 0);
  EXPECT_EQ(Read("a.csv"), Read("d.csv"));
}

TEST_F(CliTest, SynthesizeReplicatesUseConsecutiveSeeds) {
  WriteMicrodata();
  ASSERT_EQ(Run({"tabulate", "--input", Path("micro.csv"), "--schema",
                 Path("schema.json"), "--output", Path("t.csv")}),
            0);
  ASSERT_EQ(
      Run({"synthesize", "--input", Path("t.csv"), "--alpha", "0.5", "--seed",
           "5", "--replicates", "2", "--output", Path("r.csv")}),
      0)
      << err_.str();
  ASSERT_EQ(Run({"synthesize", "--input", Path("t.csv"), "--alpha", "0.5",
                 "--seed", "6", "--output", Path("s6.csv")}),
            0);
  auto schema = SchemaFromJson(Read("schema.json"));
  EXPECT_EQ(*ParseTable(Read("r.csv.2"), *schema, ','),
            *ParseTable(Read("s6.csv"), *schema, ','));
  EXPECT_TRUE(fs::exists(Path("r.csv.1")));
}

TEST_F(CliTest, ValidationErrorsLeaveNoOutput) {
  WriteMicrodata();
  ASSERT_EQ(Run({"tabulate", "--input", Path("micro.csv"), "--schema",
                 Path("schema.json"), "--output", Path("t.csv")}),
            0);
  // Zero cells exist, so alpha = 0 is rejected.
  EXPECT_EQ(Run({"synthesize", "--input", Path("t.csv"), "--alpha", "0",
                 "--output", Path("bad.csv")}),
            kExitValidation);
  EXPECT_THAT(err_.str(), HasSubstr("alpha=0"));
  EXPECT_FALSE(fs::exists(Path("bad.csv")));
  EXPECT_EQ(
      Run({"synthesize", "--input", Path("t.csv"), "--mechanism", "dirichlet",
           "--concentrations", "1", "2", "--output", Path("bad2.csv")}),
      kExitValidation);
  EXPECT_FALSE(fs::exists(Path("bad2.csv")));
  EXPECT_EQ(Run({"curve", "--epsilons", "0.5", "--alphas", "1", "--output",
                 Path("bad3.csv")}),
            kExitValidation);
  EXPECT_FALSE(fs::exists(Path("bad3.csv")));
  Write("bad_micro.csv", "sex,age,region\nX,young,north\n");
  EXPECT_EQ(Run({"tabulate", "--input", Path("bad_micro.csv"), "--schema",
                 Path("schema.json"), "--output", Path("bad4.csv")}),
            kExitValidation);
  EXPECT_THAT(err_.str(), HasSubstr("'X'"));
  EXPECT_FALSE(fs::exists(Path("bad4.csv")));
  EXPECT_EQ(Run({"account", "--epsilon", "2", "--alpha", "-1"}),
            kExitValidation);
}

TEST_F(CliTest, IoErrorsExitTwo) {
  EXPECT_EQ(Run({"tabulate", "--input", Path("missing.csv"), "--output",
                 Path("t.csv")}),
            kExitIo);
  EXPECT_FALSE(fs::exists(Path("t.csv")));
  EXPECT_EQ(Run({"curve", "--epsilons", "2", "--alphas", "1", "--output",
                 Path("no/dir/c.csv")}),
            kExitIo);
}

TEST_F(CliTest, CurveFile) {
  ASSERT_EQ(Run({"curve", "--epsilons", "2", "--alphas", "1.0", "--output",
                 Path("c.csv")}),
            0)
      << err_.str();
  const std::string c = Read("c.csv");
  EXPECT_THAT(c, HasSubstr("alpha,epsilon,delta\n1,2,0.0526"));
  EXPECT_THAT(c, StartsWith("# "));
}

TEST_F(CliTest, AccountReportsJson) {
  ASSERT_EQ(Run({"account", "--epsilon", "2", "--alpha", "1"}), 0)
      << err_.str();
  EXPECT_THAT(out_.str(), HasSubstr("0.05265301734371"));
  ASSERT_EQ(Run({"account", "--epsilon", "2", "--delta-target", "0.06",
                 "--alpha-grid", "0.1", "0.2", "0.3", "0.4", "0.5", "0.6",
                 "0.7", "0.8", "0.9", "1.0"}),
            0)
      << err_.str();
  EXPECT_THAT(out_.str(), HasSubstr("0.9"));
  ASSERT_EQ(Run({"account", "--mechanism", "gaussian", "--sigma", "1",
                 "--epsilon", "1"}),
            0)
      << err_.str();
  EXPECT_THAT(out_.str(), HasSubstr("0.375344739994"));
}

TEST_F(CliTest, AuditReport) {
  ASSERT_EQ(
      Run({"audit", "--alpha", "0.1", "--epsilon", "3", "--a-values", "1", "2",
           "--trials", "20000", "--seed", "3", "--scan-a-max", "100"}),
      0)
      << err_.str();
  EXPECT_THAT(out_.str(),
              HasSubstr("a_k,empirical,analytic,std_error,pass\n1,"));
  EXPECT_THAT(out_.str(), HasSubstr("pass"));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  Write("run.toml", "[curve]\nepsilons = [3.0]\nalphas = [0.1]\n");
  ASSERT_EQ(Run({"--config", Path("run.toml"), "curve"}), 0) << err_.str();
  EXPECT_THAT(out_.str(), HasSubstr("0.1,3,0.30097"));
  ASSERT_EQ(Run({"--config", Path("run.toml"), "curve", "--epsilons", "2",
                 "--alphas", "1"}),
            0)
      << err_.str();
  EXPECT_THAT(out_.str(), HasSubstr("1,2,0.0526"));
}

TEST_F(CliTest, PipelineIsReproducible) {
  WriteMicrodata();
  auto pipeline = [&](const std::string& tag) {
    EXPECT_EQ(Run({"tabulate", "--input", Path("micro.csv"), "--schema",
                   Path("schema.json"), "--output", Path(tag + "t.csv")}),
              0);
    EXPECT_EQ(Run({"synthesize", "--input", Path(tag + "t.csv"), "--alpha", "1",
                   "--seed", "9", "--replicates", "3", "--output",
                   Path(tag + "s.csv")}),
              0);
    EXPECT_EQ(Run({"utility", "--original", Path(tag + "t.csv"), "--synthetic",
                   Path(tag + "s.csv.1"), Path(tag + "s.csv.2"),
                   Path(tag + "s.csv.3"), "--output", Path(tag + "u.csv")}),
              0)
        << err_.str();
    return Read(tag + "u.csv");
  };
  const std::string first = pipeline("x");
  EXPECT_THAT(first, HasSubstr("count,min,q1,median,q3,max,mean,n\n"));
  // Paths are excluded from the provenance hash, so reports match verbatim
  // apart from the file names in the params line.
  const std::string second = pipeline("y");
  auto body = [](const std::string& s) {
    return s.substr(s.find("count,min"));
  };
  EXPECT_EQ(body(first), body(second));
}

}  // namespace
}  // namespace ctsynth
