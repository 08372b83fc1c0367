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

#include "ctsynth/table_io.h"

#include <filesystem>
#include <random>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace ctsynth {
namespace {

std::vector<Count> Vec(std::span<const Count> s) {
  return {s.begin(), s.end()};
}

using ::testing::ElementsAre;

TEST(ParseDelimitedTest, QuotesCrlfAndBlankLines) {
  auto r = ParseDelimited("a,\"b,c\",\"d\"\"e\"\r\n\nx,,z\n", ',');
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_EQ(r->size(), 2u);
  EXPECT_THAT((*r)[0], ElementsAre("a", "b,c", "d\"e"));
  EXPECT_THAT((*r)[1], ElementsAre("x", "", "z"));
}

TEST(ParseDelimitedTest, CustomDelimiterAndComments) {
  auto r =
      ParseDelimited("# note\na;b\n\"#x\";c\n", ';', /*skip_comments=*/true);
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r->size(), 2u);
  EXPECT_THAT((*r)[1], ElementsAre("#x", "c"));
}

TEST(ParseDelimitedTest, Errors) {
  EXPECT_FALSE(ParseDelimited("a,\"b\n", ',').ok());
  EXPECT_FALSE(ParseDelimited("a,b\"c\"\n", ',').ok());
}

TEST(FormatDelimitedRowTest, QuotesWhenNeeded) {
  EXPECT_EQ(FormatDelimitedRow({"a", "b,c", "q\"", "#h"}, ','),
            "a,\"b,c\",\"q\"\"\",\"#h\"");
}

TEST(SchemaJsonTest, RoundTripAndValidation) {
  auto s = Schema::Create({{"sex", {"F", "M"}}, {"age", {"0-15", "16+", "?"}}});
  ASSERT_TRUE(s.ok());
  auto back = SchemaFromJson(SchemaToJson(*s));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, *s);
  EXPECT_FALSE(SchemaFromJson("{").ok());
  EXPECT_FALSE(SchemaFromJson("{\"variables\": 3}").ok());
  EXPECT_FALSE(
      SchemaFromJson(
          "{\"variables\": [{\"name\": \"x\", \"categories\": [1, 2]}]}")
          .ok());
  EXPECT_FALSE(
      SchemaFromJson(
          "{\"variables\": [{\"name\": \"x\", \"categories\": [\"a\"]}]}")
          .ok());
}

TEST(TableFormatTest, LayoutIncludesZeroCellsAndComments) {
  auto s = Schema::Create({{"A", {"a0", "a1"}}, {"B", {"b0", "b1"}}});
  auto t = ContingencyTable::Create(*s, {3, 0, 1, 2});
  EXPECT_EQ(FormatTable(*t, ',', {"seed: 1"}),
            "# seed: 1\nA,B,count\na0,b0,3\na0,b1,0\na1,b0,1\na1,b1,2\n");
  EXPECT_THAT(ParseTableComments(FormatTable(*t, ',', {"x: 1", "y: 2"})),
              ElementsAre("x: 1", "y: 2"));
}

TEST(TableFormatTest, ParseRoundTripProperty) {
  auto s = Schema::Create(
      {{"A", {"a,0", "a\"1", "#a2"}}, {"B", {"b0", "b1"}}, {"C", {"x", "y"}}});
  ASSERT_TRUE(s.ok());
  std::mt19937_64 gen(2);
  for (char delim : {',', ';', '\t'}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Count> counts(s->num_cells());
      for (auto& c : counts) c = gen() % 1000;
      counts[0] = gen();  // full 64-bit range
      auto t = ContingencyTable::Create(*s, counts);
      ASSERT_TRUE(t.ok());
      auto back = ParseTable(FormatTable(*t, delim, {"c"}), *s, delim);
      ASSERT_TRUE(back.ok()) << back.status();
      EXPECT_EQ(*back, *t);
    }
  }
}

TEST(TableFormatTest, ParseErrors) {
  auto s = Schema::Create({{"A", {"a0", "a1"}}});
  EXPECT_FALSE(ParseTable("", *s, ',').ok());
  EXPECT_FALSE(ParseTable("B,count\na0,1\na1,2\n", *s, ',').ok());
  EXPECT_FALSE(ParseTable("A,count\na0,1\n", *s, ',').ok());  // missing cell
  EXPECT_FALSE(ParseTable("A,count\na0,1\na0,2\n", *s, ',').ok());  // repeat
  EXPECT_FALSE(ParseTable("A,count\na0,-1\na1,2\n", *s, ',').ok());
  EXPECT_FALSE(ParseTable("A,count\na0,1.5\na1,2\n", *s, ',').ok());
  EXPECT_FALSE(ParseTable("A,count\na0,1\na9,2\n", *s, ',').ok());
  EXPECT_TRUE(ParseTable("A,count\na1,2\na0,1\n", *s, ',').ok());
}

TEST(TabulateMicrodataTest, MatchesColumnsByNameAndInfersSchema) {
  auto s = Schema::Create({{"A", {"a0", "a1"}}, {"B", {"b0", "b1"}}});
  auto data = ParseMicrodata("B,A\nb1,a0\nb1,a0\nb0,a1\n", ',');
  ASSERT_TRUE(data.ok());
  auto t = TabulateMicrodata(*data, *s);
  ASSERT_TRUE(t.ok()) << t.status();
  EXPECT_THAT(Vec(t->counts()), ElementsAre(0, 2, 1, 0));

  auto inferred = TabulateMicrodata(*data, std::nullopt);
  ASSERT_TRUE(inferred.ok());
  EXPECT_EQ(inferred->schema().variables()[0].name, "B");
  EXPECT_THAT(Vec(inferred->counts()), ElementsAre(0, 1, 2, 0));

  auto missing = ParseMicrodata("A,C\na0,b0\n", ',');
  EXPECT_FALSE(TabulateMicrodata(*missing, *s).ok());
  EXPECT_FALSE(ParseMicrodata("", ',').ok());
}

TEST(FileIoTest, AtomicWriteAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "ctsynth_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "f.txt").string();
  ASSERT_TRUE(WriteFileAtomic(path, "hello").ok());
  EXPECT_EQ(*ReadFile(path), "hello");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_EQ(ReadFile((dir / "nope").string()).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(WriteFileAtomic((dir / "no/such/dir/f").string(), "x").code(),
            absl::StatusCode::kUnavailable);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace ctsynth
