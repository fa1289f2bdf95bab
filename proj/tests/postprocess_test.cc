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

#include "gensf/postprocess.h"

#include <functional>

#include "doctest.h"
#include "gensf/error.h"
#include "gensf/random.h"
#include "gensf/tokenizer.h"

namespace gensf {
namespace {

std::size_t SlowLevenshtein(const std::string& a, const std::string& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::string ra = a.substr(1), rb = b.substr(1);
  if (a[0] == b[0]) return SlowLevenshtein(ra, rb);
  return 1 + std::min({SlowLevenshtein(ra, b), SlowLevenshtein(a, rb), SlowLevenshtein(ra, rb)});
}

std::vector<std::string> AllStrings(std::size_t max_len) {
  std::vector<std::string> out = {""};
  for (std::size_t begin = 0, len = 0; len < max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char c : {'a', 'b', 'c'}) out.push_back(out[i] + c);
    }
    begin = end;
  }
  return out;
}

const Vocab& WordVocab() {
  static const Vocab vocab = TrainBpe({"my name is Marisol", "table for two"}, Vocab::kBaseSize + 30);
  return vocab;
}

TEST_CASE("levenshtein examples") {
  CHECK(Levenshtein("Haver", "Halver") == 1);
  CHECK(Levenshtein("table", "table") == 0);
  CHECK(Levenshtein("", "abc") == 3);
  CHECK(Levenshtein("kitten", "sitting") == 3);
  CHECK(Levenshtein("caf\xc3\xa9", "cafe") == 1);  // one code point
}

TEST_CASE("levenshtein matches the recursive oracle on short strings") {
  // All strings up to length 4 exhaustively, then random pairs up to 7.
  const auto small = AllStrings(4);
  for (const auto& a : small) {
    for (const auto& b : small) REQUIRE(Levenshtein(a, b) == SlowLevenshtein(a, b));
  }
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    for (std::size_t k = UniformIndex(rng, 8); k > 0; --k) a += "abc"[UniformIndex(rng, 3)];
    for (std::size_t k = UniformIndex(rng, 8); k > 0; --k) b += "abc"[UniformIndex(rng, 3)];
    REQUIRE(Levenshtein(a, b) == SlowLevenshtein(a, b));
  }
}

TEST_CASE("span counts") {
  const Vocab bytes = TrainBpe({"x"}, Vocab::kBaseSize);
  CHECK(EnumerateSpans("abc", bytes.Encode("abc"), 10).size() == 6);
  CHECK(EnumerateSpans("a", bytes.Encode("a"), 10).size() == 1);
  const std::string twenty(20, 'z');
  CHECK(EnumerateSpans(twenty, bytes.Encode(twenty), 10).size() == 155);
}

TEST_CASE("spans carry exact ranges") {
  const std::string u = "my name is Marisol Halver";
  for (const CandidateSpan& s : EnumerateSpans(u, WordVocab().Encode(u), 10)) {
    CHECK(u.substr(s.range.start, s.range.size()) == s.text);
  }
}

TEST_CASE("recovery examples") {
  const std::string u = "my name is Marisol Halver";
  const TokenSeq tokens = WordVocab().Encode(u);
  const RecoveryConfig cfg;

  const RecoveredValue typo = RecoverSpan("Haver", u, tokens, cfg);
  CHECK(typo.kind == RecoveredValue::Kind::kSpan);
  CHECK(typo.text == "Halver");
  CHECK(u.substr(typo.range.start, typo.range.size()) == "Halver");

  const RecoveredValue exact = RecoverSpan("marisol", u, tokens, cfg);
  CHECK(exact.kind == RecoveredValue::Kind::kSpan);
  CHECK(exact.text == "Marisol");

  const RecoveredValue raw = RecoverSpan("zzzzz", u, tokens, cfg);
  CHECK(raw.kind == RecoveredValue::Kind::kRaw);
  CHECK(raw.text == "zzzzz");

  CHECK(RecoverSpan(" Not Provided ", u, tokens, cfg).is_null());
}

TEST_CASE("recovery is idempotent and monotone in the threshold") {
  const std::string u = "table for two at noon on friday";
  const TokenSeq tokens = WordVocab().Encode(u);
  Rng rng(8);
  const std::string letters = "abcdefghijklmnopqrstuvwxyz ";
  for (int trial = 0; trial < 300; ++trial) {
    std::string g;
    for (std::size_t k = 1 + UniformIndex(rng, 8); k > 0; --k) {
      g += letters[UniformIndex(rng, letters.size())];
    }
    RecoveryConfig low;
    low.threshold_ratio = 0.2;
    const RecoveredValue once = RecoverSpan(g, u, tokens, low);
    CHECK(RecoverSpan(once.text, u, tokens, low).text == once.text);
    RecoveryConfig high = low;
    high.threshold_ratio = 0.6;
    if (once.kind == RecoveredValue::Kind::kSpan) {
      CHECK(RecoverSpan(g, u, tokens, high).kind == RecoveredValue::Kind::kSpan);
    }
    // Output is NULL, a span of the utterance, or the input unchanged.
    const RecoveredValue r = RecoverSpan(g, u, tokens, high);
    if (r.kind == RecoveredValue::Kind::kRaw) CHECK(r.text == g);
    if (r.kind == RecoveredValue::Kind::kSpan) {
      CHECK(u.substr(r.range.start, r.range.size()) == r.text);
    }
  }
}

TEST_CASE("nearest span ignores the threshold") {
  const std::string u = "my name is Marisol Halver";
  const TokenSeq tokens = WordVocab().Encode(u);
  const RecoveredValue r = NearestSpan("Hxxxxr", u, tokens, RecoveryConfig{});
  CHECK(r.kind == RecoveredValue::Kind::kSpan);
  CHECK(r.text == "Halver");
  CHECK(RecoverSpan("Hxxxxr", u, tokens, RecoveryConfig{}).kind == RecoveredValue::Kind::kRaw);
  CHECK(NearestSpan("x", "", TokenSeq{}, RecoveryConfig{}).is_null());
}

TEST_CASE("config validation") {
  RecoveryConfig cfg;
  cfg.threshold_ratio = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg.threshold_ratio = 0.3;
  cfg.max_span_tokens = 0;
  CHECK_THROWS_AS(cfg.Validate(), Error);
}

}  // namespace
}  // namespace gensf
