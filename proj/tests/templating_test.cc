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

#include "gensf/templating.h"

#include "doctest.h"
#include "gensf/error.h"

namespace gensf {
namespace {

SlotExample Example(const std::string& utterance, std::vector<std::string> requested = {}) {
  SlotExample ex;
  ex.utterance = utterance;
  ex.requested_slots = std::move(requested);
  return ex;
}

TEST_CASE("context without requested slots") {
  const std::string u = "We will require an outside table to seat 9 people on August 23rd";
  const ContextText ctx = RenderContext(Example(u), "date", DefaultNameMap("restaurants"));
  CHECK(ctx.text == u + " [EOS] Ok, the date is");
  CHECK(ctx.text.substr(ctx.utterance_range.start, ctx.utterance_range.size()) == u);
}

TEST_CASE("context with requested slots") {
  const ContextText ctx = RenderContext(Example("Laurice Hoisl", {"first_name", "last_name"}),
                                        "first_name", DefaultNameMap("restaurants"));
  CHECK(ctx.text ==
        "What is the first name, last name? [EOS] Laurice Hoisl [EOS] Ok, the first name is");
  CHECK(ctx.text.substr(ctx.utterance_range.start, ctx.utterance_range.size()) == "Laurice Hoisl");
}

TEST_CASE("people maps to number of people") {
  const ContextText ctx = RenderContext(Example("My party will be 9 people"), "people",
                                        DefaultNameMap("restaurants"));
  CHECK(ctx.text.ends_with("Ok, the number of people is"));
}

TEST_CASE("trivial context uses the raw key") {
  const ContextText ctx = RenderTrivialContext(Example("table at 7pm"), "time");
  CHECK(ctx.text == "table at 7pm [EOS] time =");
  CHECK(RenderTrivialContext(Example("hi", {"people"}), "people").text == "hi [EOS] people =");
  CHECK(RenderTrivialContext(Example("Ann Lee"), "first_name").text == "Ann Lee [EOS] first_name =");
}

TEST_CASE("targets") {
  SlotExample ex = Example("on August 23rd");
  CHECK(RenderTarget(ex, SlotLabel{}).text == "not provided [EOS]");
  const TargetText t = RenderTarget(ex, SlotLabel{Span{3, 14}});
  CHECK(t.text == "August 23rd [EOS]");
  REQUIRE(t.span.has_value());
  CHECK_THROWS_AS(RenderTarget(ex, SlotLabel{Span{3, 3}}), Error);
}

TEST_CASE("default name maps") {
  CHECK(DefaultNameMap("restaurants").Phrase("people") == "number of people");
  CHECK(DefaultNameMap("restaurants").Phrase("first_name") == "first name");
  CHECK(DefaultNameMap("synthetic").Phrase("time") == "time");
  CHECK_THROWS_AS(DefaultNameMap("no-such-domain"), Error);
}

TEST_CASE("missing key names the key") {
  const NameMap names = DefaultNameMap("synthetic");
  try {
    names.Phrase("cuisine");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    CHECK(std::string(e.what()).find("cuisine") != std::string::npos);
  }
}

TEST_CASE("name map text round trip") {
  const NameMap names = NameMap::Parse("# comment\npeople = number of people\ntime=time\n");
  CHECK(names.Phrase("people") == "number of people");
  CHECK(NameMap::Parse(names.Serialize()).phrases() == names.phrases());
}

}  // namespace
}  // namespace gensf
