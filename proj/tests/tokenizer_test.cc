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

#include "gensf/tokenizer.h"

#include <algorithm>

#include "doctest.h"
#include "gensf/error.h"
#include "gensf/random.h"

namespace gensf {
namespace {

void CheckTiling(const std::string& text, const TokenSeq& seq) {
  REQUIRE(seq.ids.size() == seq.spans.size());
  std::size_t covered = 0;
  for (std::size_t i = 0; i < seq.spans.size(); ++i) {
    CHECK(seq.spans[i].start <= seq.spans[i].end);
    CHECK(seq.spans[i].end <= text.size());
    if (i > 0) CHECK(seq.spans[i - 1].end <= seq.spans[i].start);
    covered = seq.spans[i].end;
  }
  CHECK(covered <= text.size());
}

TEST_CASE("one merge on aaab aaab") {
  const Vocab v = TrainBpe({"aaab aaab"}, Vocab::kBaseSize + 1);
  REQUIRE(v.merges().size() == 1);
  CHECK(v.merges()[0] == std::pair<TokenId, TokenId>{'a', 'a'});
  CHECK(v.Piece(Vocab::kBaseSize) == "aa");
}

TEST_CASE("base size gives a byte vocabulary") {
  const Vocab v = TrainBpe({"hello world"}, Vocab::kBaseSize);
  CHECK(v.merges().empty());
  CHECK(v.size() == Vocab::kBaseSize);
  CHECK(v.Encode("hi").ids == std::vector<TokenId>{'h', 'i'});
}

TEST_CASE("training is deterministic") {
  const std::vector<std::string> corpus = {"the cat sat on the mat", "the dog sat", "a cat"};
  CHECK(TrainBpe(corpus, Vocab::kBaseSize + 20).Serialize() ==
        TrainBpe(corpus, Vocab::kBaseSize + 20).Serialize());
}

TEST_CASE("empty text encodes to nothing") {
  const Vocab v = TrainBpe({"abc"}, Vocab::kBaseSize + 2);
  CHECK(v.Encode("").ids.empty());
}

TEST_CASE("unmerged word splits into tiling pieces") {
  const Vocab v = TrainBpe({"my name is Marisol", "the hall"}, Vocab::kBaseSize + 30);
  const TokenSeq seq = v.Encode("Halver");
  CHECK(seq.ids.size() > 1);
  CHECK(seq.spans.front().start == 0);
  CHECK(seq.spans.back().end == 6);
  for (std::size_t i = 1; i < seq.spans.size(); ++i) {
    CHECK(seq.spans[i].start == seq.spans[i - 1].end);
  }
  CHECK(v.Decode(seq.ids) == "Halver");
}

TEST_CASE("specials encode as single ids") {
  const Vocab v = TrainBpe({"hi there"}, Vocab::kBaseSize + 5);
  const TokenSeq seq = v.Encode("hi [EOS] there");
  CHECK(std::count(seq.ids.begin(), seq.ids.end(), Vocab::kEos) == 1);
  CHECK(v.Decode(seq.ids) == "hi [EOS] there");
  CHECK(v.Decode(std::vector<TokenId>{Vocab::kPad, Vocab::kUnk}) == "[PAD][UNK]");
}

TEST_CASE("spans of words exclude the leading space") {
  const Vocab v = TrainBpe({"table at seven"}, Vocab::kBaseSize + 40);
  const std::string text = "table at seven";
  const TokenSeq seq = v.Encode(text);
  CheckTiling(text, seq);
  for (const Span& s : seq.spans) {
    if (s.size() > 0) CHECK(text[s.start] != ' ');
  }
}

TEST_CASE("random strings round trip without UNK") {
  Rng rng(DeriveSeed(1, "tokenizer-test"));
  const std::string alphabet = "abc XYZ 0123.,!?'\t\n\xc3\xa9\xe2\x82\xac";
  std::vector<std::string> corpus;
  for (int i = 0; i < 200; ++i) {
    std::string s;
    const std::size_t len = UniformIndex(rng, 30);
    for (std::size_t j = 0; j < len; ++j) s += alphabet[UniformIndex(rng, alphabet.size())];
    corpus.push_back(s);
  }
  const Vocab v = TrainBpe(corpus, Vocab::kBaseSize + 60);
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    const std::size_t len = UniformIndex(rng, 24);
    for (std::size_t j = 0; j < len; ++j) s += static_cast<char>(UniformIndex(rng, 256));
    const TokenSeq seq = v.Encode(s);
    REQUIRE(v.Decode(seq.ids) == s);
    CHECK(std::find(seq.ids.begin(), seq.ids.end(), Vocab::kUnk) == seq.ids.end());
  }
}

TEST_CASE("vocab text round trip") {
  const Vocab v = TrainBpe({"slot filling as generation", "slot values"}, Vocab::kBaseSize + 25);
  const Vocab back = Vocab::Parse(v.Serialize());
  CHECK(back.Serialize() == v.Serialize());
  CHECK(back.Encode("slot filling").ids == v.Encode("slot filling").ids);
}

TEST_CASE("bad ids and sizes are rejected") {
  const Vocab v = TrainBpe({"abc"}, Vocab::kBaseSize);
  CHECK_THROWS_AS(v.Decode(std::vector<TokenId>{v.size()}), Error);
  CHECK_THROWS_AS(v.Decode(std::vector<TokenId>{-1}), Error);
  CHECK_THROWS_AS(TrainBpe({"abc"}, 10), Error);
  CHECK_THROWS_AS(Vocab::Parse("garbage"), Error);
}

}  // namespace
}  // namespace gensf
