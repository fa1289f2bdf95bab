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

#include "gensf/eval.h"

#include <algorithm>

#include "doctest.h"
#include "gensf/error.h"
#include "test_util.h"

namespace gensf {
namespace {

using testing::TinyConfig;

std::vector<SlotExample> GoldA(const std::vector<std::string>& values) {
  std::vector<SlotExample> out;
  for (const std::string& v : values) {
    SlotExample ex;
    ex.utterance = "x " + v;
    if (!v.empty()) ex.labels["A"] = SlotLabel{Span{2, 2 + v.size()}};
    out.push_back(ex);
  }
  return out;
}

TEST_CASE("hand-counted F1") {
  // 10 examples: 3 right, 1 wrong, 2 missed, 4 correct NULLs.
  const auto gold = GoldA({"a", "b", "c", "d", "e", "f", "", "", "", ""});
  std::vector<SlotPredictions> pred(10);
  pred[0]["A"] = "a";
  pred[1]["A"] = "B";  // case-insensitive match
  pred[2]["A"] = " c ";
  pred[3]["A"] = "zz";
  pred[4]["A"] = std::nullopt;
  pred[5]["A"] = std::nullopt;
  const EvalReport r = SlotF1(pred, gold, {"A"});
  const SlotScore& s = r.slots.at("A");
  CHECK(s.tp == 3);
  CHECK(s.fp == 1);
  CHECK(s.fn == 2);
  CHECK(s.precision == doctest::Approx(75.0));
  CHECK(s.recall == doctest::Approx(60.0));
  CHECK(s.f1 == doctest::Approx(66.6667).epsilon(1e-5));
  CHECK(r.macro_f1 == doctest::Approx(s.f1));
}

TEST_CASE("perfect and empty predictions") {
  const auto gold = GoldA({"a", "b", ""});
  std::vector<SlotPredictions> perfect(3), none(3);
  perfect[0]["A"] = "a";
  perfect[1]["A"] = "b";
  CHECK(SlotF1(perfect, gold, {"A"}).macro_f1 == 100.0);
  const EvalReport r = SlotF1(none, gold, {"A"});
  CHECK(r.slots.at("A").precision == 0.0);
  CHECK(r.slots.at("A").recall == 0.0);
  CHECK(r.macro_f1 == 0.0);
}

TEST_CASE("prediction for an unknown slot is an error") {
  std::vector<SlotPredictions> pred(1);
  pred[0]["B"] = "x";
  CHECK_THROWS_AS(SlotF1(pred, GoldA({"a"}), {"A"}), Error);
}

TEST_CASE("reports are consistent and order independent") {
  const auto corpus = GenerateSynthetic({10, 60, 5}, 3);
  Rng rng(4);
  std::vector<SlotPredictions> pred;
  for (const auto& ex : corpus.test.examples) {
    SlotPredictions p;
    for (const auto& key : corpus.test.slot_keys) {
      switch (UniformIndex(rng, 3)) {
        case 0:
          p[key] = ex.Surface(key).empty() ? std::optional<std::string>() : ex.Surface(key);
          break;
        case 1:
          p[key] = "junk";
          break;
        default:
          p[key] = std::nullopt;
      }
    }
    pred.push_back(p);
  }
  const EvalReport r = SlotF1(pred, corpus.test.examples, corpus.test.slot_keys);
  double sum = 0;
  for (const auto& [key, s] : r.slots) {
    const SlotScore again = ScoreFromCounts(s.tp, s.fp, s.fn);
    CHECK(std::abs(again.f1 - s.f1) < 1e-9);
    sum += s.f1;
  }
  CHECK(std::abs(r.macro_f1 - sum / r.slots.size()) < 1e-9);

  // Reversed slot order in every prediction map gives the same macro score.
  std::vector<SlotPredictions> reordered;
  for (const auto& p : pred) reordered.emplace_back(p.rbegin(), p.rend());
  CHECK(SlotF1(reordered, corpus.test.examples, corpus.test.slot_keys).macro_f1 == r.macro_f1);
  CHECK(r.ToCsv().starts_with("slot,tp,fp,fn,precision,recall,f1\n"));
}

TEST_CASE("zero-shot preset drops the copy head") {
  const PipelineConfig zs = PipelineConfig::FromPreset(PipelineConfig::Preset::kZeroShot,
                                                       DefaultNameMap("synthetic"));
  CHECK_FALSE(zs.copy_enabled);
  CHECK(zs.constrained);
  CHECK(zs.recover_enabled);
  CHECK(PipelineConfig::FromPreset(PipelineConfig::Preset::kFull, {}).copy_enabled);
}

// A model that always answers "not provided": trained on all-NULL pairs.
TEST_CASE("model that always declines predicts NULL everywhere") {
  auto corpus = GenerateSynthetic({24, 8, 5}, 5);
  for (auto& ex : corpus.train.examples) ex.labels.clear();
  const NameMap names = DefaultNameMap("synthetic");
  const Vocab vocab = TrainBpe({"not provided", "x"}, Vocab::kBaseSize + 12);
  ModelConfig c = TinyConfig(vocab.size(), 1, 16, 2);
  c.context_window = 128;
  Model m(c);
  TrainConfig tc;
  tc.epochs = 30;
  tc.learning_rate = 1e-2;
  tc.batch_size = 8;
  Train(m, vocab, corpus.train, names, tc);
  PipelineConfig pc = PipelineConfig::FromPreset(PipelineConfig::Preset::kFull, names);
  for (const auto& ex : corpus.test.examples) {
    for (const auto& [key, value] : PredictSlots(m, vocab, ex, corpus.test.slot_keys, pc)) {
      CHECK_FALSE(value.has_value());
    }
  }
}

TEST_CASE("untrained constrained predictions are utterance spans") {
  const auto corpus = GenerateSynthetic({100, 40, 5}, 6);
  const NameMap names = DefaultNameMap("synthetic");
  const Vocab vocab = TrainBpe({corpus.train.examples[0].utterance, "not provided"},
                               Vocab::kBaseSize + 20);
  ModelConfig c = TinyConfig(vocab.size(), 1, 16, 2);
  c.context_window = 256;
  const Model m(c);
  const PipelineConfig pc = PipelineConfig::FromPreset(PipelineConfig::Preset::kZeroShot, names);
  for (const auto& ex : corpus.test.examples) {
    const TokenSeq tokens = vocab.Encode(ex.utterance);
    std::set<std::string> spans;
    for (std::size_t i = 0; i < tokens.ids.size(); ++i) {
      for (std::size_t j = i; j < tokens.ids.size(); ++j) {
        const std::size_t b = tokens.spans[i].start, e = tokens.spans[j].end;
        spans.insert(ex.utterance.substr(b, e - b));
      }
    }
    for (const auto& [key, value] : PredictSlots(m, vocab, ex, corpus.test.slot_keys, pc)) {
      if (value) CHECK(spans.contains(*value));
    }
  }
}

TEST_CASE("trivial template pipeline renders the key") {
  SlotExample ex;
  ex.utterance = "at 7pm";
  const Vocab vocab = TrainBpe({"at 7pm time ="}, Vocab::kBaseSize + 5);
  ModelConfig c = TinyConfig(vocab.size());
  const Model m(c);
  PipelineConfig pc;
  pc.template_style = TemplateStyle::kTrivial;
  pc.max_len = 2;
  CHECK(PredictSlot(m, vocab, ex, "time", pc).context.text == "at 7pm [EOS] time =");
}

TEST_CASE("ablation grid shape and determinism") {
  const auto corpus = GenerateSynthetic({32, 6, 5}, 8);
  const NameMap names = DefaultNameMap("synthetic");
  std::vector<std::string> texts;
  for (const auto& ex : corpus.train.examples) texts.push_back(ex.utterance);
  texts.push_back("not provided");
  const Vocab vocab = TrainBpe(texts, Vocab::kBaseSize + 30);
  AblationSetup setup;
  setup.model = TinyConfig(vocab.size(), 1, 16, 2);
  setup.model.context_window = 128;
  setup.epochs_override = 1;
  setup.names = names;
  setup.seed = 3;
  setup.max_len = 4;
  const std::vector<AblationSplit> splits = {{"full", 1, false}, {"1/2", 2, false},
                                             {"zero-shot", 1, true}};
  const AblationResult a = RunAblation(setup, vocab, corpus.train, corpus.test, splits);
  CHECK(a.rows.size() == 16);
  CHECK(a.columns.size() == 3);
  int empty = 0;
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (!a.results[r][c]) {
        ++empty;
        CHECK(a.rows[r].copy_enabled);
        CHECK(c == 2);
      }
    }
  }
  CHECK(empty == 8);
  const AblationResult b = RunAblation(setup, vocab, corpus.train, corpus.test, splits);
  CHECK(a.ToCsv() == b.ToCsv());
}

}  // namespace
}  // namespace gensf
