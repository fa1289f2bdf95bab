// Copyright 2026 The GenSF Authors.
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

#include "gensf/corpus.h"

#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "gensf/error.h"

namespace gensf {
namespace {

Dataset Numbered(std::size_t n) {
  Dataset d;
  d.domain_name = "test";
  d.slot_keys = {"x"};
  for (std::size_t i = 0; i < n; ++i) {
    SlotExample ex;
    ex.utterance = "u" + std::to_string(i);
    ex.labels["x"] = SlotLabel{Span{0, 1}};
    d.examples.push_back(ex);
  }
  return d;
}

TEST_CASE("single record loads with its label") {
  const Dataset d = ParseDataset(
      R"({"utterance":"Laurice Hoisl","requested":["first_name","last_name"],)"
      R"("labels":{"first_name":{"span":[0,7]}}})",
      "inline");
  REQUIRE(d.examples.size() == 1);
  CHECK(d.examples[0].Surface("first_name") == "Laurice");
  CHECK(d.examples[0].requested_slots == std::vector<std::string>{"first_name", "last_name"});
  CHECK(d.slot_keys.contains("first_name"));
}

TEST_CASE("empty input is an empty valid dataset") {
  const Dataset d = ParseDataset("", "empty");
  CHECK(d.examples.empty());
}

TEST_CASE("span past the end of the utterance fails validation") {
  try {
    ParseDataset(R"({"utterance":"hi","labels":{"x":{"span":[0,9]}}})", "bad");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
  }
}

TEST_CASE("malformed json reports a parse error") {
  CHECK_THROWS_AS(ParseDataset("{not json", "bad"), Error);
  try {
    ParseDataset("{not json", "bad");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
  }
}

TEST_CASE("labels must use declared slot keys") {
  const std::string text =
      R"({"domain":"d","slot_keys":["a"]})"
      "\n"
      R"({"utterance":"xy","labels":{"b":{"span":[0,1]}}})";
  CHECK_THROWS_AS(ParseDataset(text, "keys"), Error);
}

TEST_CASE("serialize and parse round trip") {
  const auto corpus = GenerateSynthetic({50, 10, 5}, 3);
  const Dataset back = ParseDataset(SerializeDataset(corpus.train), "rt");
  CHECK(back == corpus.train);
}

TEST_CASE("split of 8198 examples at 1/16 keeps 512") {
  const Dataset d = Numbered(8198);
  CHECK(SplitFraction(d, 16, 1).examples.size() == 512);
  CHECK(SplitFraction(d, 128, 1).examples.size() == 64);
}

TEST_CASE("split at fraction 1 is the identity") {
  const Dataset d = Numbered(37);
  CHECK(SplitFraction(d, 1, 99) == d);
}

TEST_CASE("split is deterministic and seed dependent") {
  const Dataset d = Numbered(400);
  CHECK(SplitFraction(d, 8, 5) == SplitFraction(d, 8, 5));
  CHECK_FALSE(SplitFraction(d, 8, 5) == SplitFraction(d, 8, 6));
}

TEST_CASE("split subsets keep original order") {
  const Dataset d = Numbered(200);
  const Dataset s = SplitFraction(d, 4, 2);
  std::vector<std::size_t> idx;
  for (const auto& ex : s.examples) idx.push_back(std::stoul(ex.utterance.substr(1)));
  CHECK(std::is_sorted(idx.begin(), idx.end()));
}

TEST_CASE("split that would be empty is an error") {
  CHECK_THROWS_AS(SplitFraction(Numbered(3), 4, 0), Error);
}

TEST_CASE("synthetic corpus has the requested sizes and validates") {
  const auto corpus = GenerateSynthetic({2000, 500, 5}, 7);
  CHECK(corpus.train.examples.size() == 2000);
  CHECK(corpus.test.examples.size() == 500);
  CHECK(corpus.train.slot_keys.size() == 5);
  ValidateDataset(corpus.train);
  ValidateDataset(corpus.test);
  const auto tiny = GenerateSynthetic({1, 1, 5}, 7);
  CHECK(tiny.train.examples.size() == 1);
  CHECK(tiny.test.examples.size() == 1);
}

TEST_CASE("synthetic corpus is byte-identical across runs") {
  const auto a = GenerateSynthetic({300, 100, 5}, 11);
  const auto b = GenerateSynthetic({300, 100, 5}, 11);
  CHECK(SerializeDataset(a.train) == SerializeDataset(b.train));
  CHECK(SerializeDataset(a.test) == SerializeDataset(b.test));
}

TEST_CASE("fewer synthetic slots restrict labels") {
  const auto corpus = GenerateSynthetic({200, 50, 3}, 1);
  CHECK(corpus.train.slot_keys == std::set<std::string>{"date", "time", "people"});
  for (const auto& ex : corpus.train.examples) {
    for (const auto& entry : ex.labels) CHECK(corpus.train.slot_keys.contains(entry.first));
  }
}

TEST_CASE("save and load through a file") {
  const auto corpus = GenerateSynthetic({20, 5, 5}, 2);
  const auto path = std::filesystem::temp_directory_path() / "gensf_corpus_test.jsonl";
  SaveDataset(corpus.train, path.string());
  CHECK(LoadDataset(path.string()) == corpus.train);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(LoadDataset(path.string()), Error);
}

}  // namespace
}  // namespace gensf
