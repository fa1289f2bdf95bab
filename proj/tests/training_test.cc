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

#include "gensf/training.h"

#include <cmath>

#include "doctest.h"
#include "gensf/error.h"
#include "test_util.h"

namespace gensf {
namespace {

using testing::RandomPair;
using testing::Randomize;
using testing::TinyConfig;

Dataset TwoOfFive() {
  Dataset d;
  d.domain_name = "synthetic";
  d.slot_keys = {"date", "first_name", "last_name", "people", "time"};
  SlotExample ex;
  ex.utterance = "table for 4 at 7pm";
  ex.labels["people"] = SlotLabel{Span{10, 11}};
  ex.labels["time"] = SlotLabel{Span{15, 18}};
  d.examples.push_back(ex);
  return d;
}

TEST_CASE("every slot key yields a pair") {
  const auto pairs = BuildTrainingPairs(TwoOfFive(), DefaultNameMap("synthetic"));
  REQUIRE(pairs.size() == 5);
  int nulls = 0;
  for (const auto& p : pairs) {
    if (p.target.text == "not provided [EOS]") ++nulls;
  }
  CHECK(nulls == 3);
  CHECK(BuildTrainingPairs(Dataset{}, DefaultNameMap("synthetic")).empty());
}

TEST_CASE("pair count is examples times keys") {
  const auto corpus = GenerateSynthetic({120, 10, 5}, 4);
  CHECK(BuildTrainingPairs(corpus.train, DefaultNameMap("synthetic")).size() == 600);
}

TEST_CASE("negative subsampling only drops NULL targets") {
  const auto corpus = GenerateSynthetic({200, 10, 5}, 4);
  const NameMap names = DefaultNameMap("synthetic");
  const auto all = BuildTrainingPairs(corpus.train, names);
  const auto some = BuildTrainingPairs(corpus.train, names, TemplateStyle::kNatural, 0.5, 3);
  auto positives = [](const std::vector<TrainingPair>& v) {
    return std::count_if(v.begin(), v.end(), [](const auto& p) { return p.label.has_value(); });
  };
  CHECK(positives(some) == positives(all));
  CHECK(some.size() < all.size());
  CHECK(BuildTrainingPairs(corpus.train, names, TemplateStyle::kNatural, 0.5, 3).size() ==
        some.size());
}

TEST_CASE("encoded pair layout") {
  const Vocab vocab = TrainBpe({"table for 4 at 7pm", "Ok, the time is"}, Vocab::kBaseSize + 30);
  const Dataset d = TwoOfFive();
  const auto pairs = BuildTrainingPairs(d, DefaultNameMap("synthetic"));
  for (const auto& p : pairs) {
    const EncodedPair e = EncodePair(vocab, p, d.examples[0].utterance);
    CHECK(e.inputs.size() == e.labels.size());
    CHECK(e.copy_mask.size() == e.inputs.size());
    CHECK(e.labels.back() == Vocab::kEos);
    for (std::size_t i = 1; i < e.inputs.size(); ++i) CHECK(e.inputs[i] == e.labels[i - 1]);
    if (p.slot_key == "time") {
      std::string target;
      for (std::size_t i = e.context_size - 1; i + 1 < e.labels.size(); ++i) {
        target += vocab.Piece(e.labels[i]);
      }
      CHECK(target == " 7pm");
    }
  }
}

TEST_CASE("uniform model loses ln V per token") {
  Transformer<double> m(TinyConfig(300));
  m.params().head_weight.setZero();
  m.params().head_bias.setZero();
  const EncodedPair pair = RandomPair(300, 8, 4, 1);
  CHECK(TeacherForcingLoss<double>(m, pair, false) == doctest::Approx(std::log(300.0)).epsilon(1e-9));
}

TEST_CASE("model certain of the target loses nothing") {
  Transformer<double> m(TinyConfig(300));
  m.params().head_weight.setZero();
  m.params().head_bias.setZero();
  m.params().head_bias(42) = 100;
  EncodedPair pair = RandomPair(300, 8, 4, 1);
  for (std::size_t i = pair.context_size - 1; i < pair.labels.size(); ++i) pair.labels[i] = 42;
  CHECK(TeacherForcingLoss<double>(m, pair, false) < 1e-12);
}

TEST_CASE("context positions are not scored") {
  Transformer<double> m(TinyConfig(300));
  Randomize(m, 2, 0.3);
  EncodedPair pair = RandomPair(300, 8, 4, 2);
  const double before = TeacherForcingLoss<double>(m, pair, true);
  for (std::size_t i = 0; i + 1 < pair.context_size; ++i) pair.labels[i] = (pair.labels[i] + 1) % 300;
  CHECK(TeacherForcingLoss<double>(m, pair, true) == before);
}

TEST_CASE("analytic loss matches the gradient routine") {
  Transformer<double> m(TinyConfig(300));
  Randomize(m, 3, 0.3);
  const EncodedPair pair = RandomPair(300, 10, 5, 3);
  for (bool copy : {false, true}) {
    Parameters<double> grads = Parameters<double>::Zeros(m.config());
    const LossResult r = LossAndGradient<double>(m, pair, copy, 1.0, grads);
    CHECK(r.tokens == pair.target_size());
    CHECK(r.mean() == doctest::Approx(TeacherForcingLoss<double>(m, pair, copy)).epsilon(1e-12));
  }
}

TEST_CASE("gradients match central differences") {
  Transformer<double> m(TinyConfig(200, 1, 16, 2));
  Randomize(m, 4, 0.3);
  const EncodedPair pair = RandomPair(200, 10, 5, 4);
  for (bool copy : {true, false}) {
    const auto errors = testing::GradientCheck(m, pair, copy, 1e-3, 12);
    for (const auto& [name, err] : errors) {
      INFO(name << " copy=" << copy);
      CHECK(err.max_relative < 1e-3);
    }
    CHECK(errors.contains("copy_weight"));
    CHECK(errors.contains("copy_bias"));
  }
}

TEST_CASE("epoch schedule") {
  CHECK(EpochsForFraction(1) == 10);
  CHECK(EpochsForFraction(2) == 20);
  CHECK(EpochsForFraction(16) == 20);
  CHECK(EpochsForFraction(32) == 40);
  CHECK(EpochsForFraction(128) == 40);
}

TEST_CASE("AdamW first step") {
  ModelConfig c = TinyConfig(260, 1, 8, 2);
  Model m(c);
  Parameters<float> grads = Parameters<float>::Zeros(c);
  TrainConfig tc;
  tc.learning_rate = 0.1;
  tc.weight_decay = 0.5;
  const float w0 = m.params().head_weight(0, 0);
  const float b0 = m.params().head_bias(0);
  grads.head_weight(0, 0) = 0.5f;
  grads.head_bias(0) = -2.0f;
  AdamW opt(tc, m.params());
  opt.Step(m.params(), grads, [](const TensorRef<float>&) { return true; });
  // Bias-corrected first step moves by lr * sign(g); decay applies to weights only.
  CHECK(m.params().head_weight(0, 0) == doctest::Approx(w0 - 0.1f - 0.1f * 0.5f * w0).epsilon(1e-5));
  CHECK(m.params().head_bias(0) == doctest::Approx(b0 + 0.1f).epsilon(1e-5));
}

TEST_CASE("gradient clipping") {
  ModelConfig c = TinyConfig(260, 1, 8, 2);
  Parameters<float> g = Parameters<float>::Zeros(c);
  g.head_bias(0) = 3.0f;
  g.copy_bias(0) = 4.0f;
  CHECK(ClipGradNorm(g, 1.0) == doctest::Approx(5.0));
  CHECK(g.head_bias(0) == doctest::Approx(0.6f));
  CHECK(g.copy_bias(0) == doctest::Approx(0.8f));
  ClipGradNorm(g, 10.0);
  CHECK(g.copy_bias(0) == doctest::Approx(0.8f));
}

std::vector<EncodedPair> SmallPairs(int vocab_size) {
  std::vector<EncodedPair> pairs;
  for (int i = 0; i < 6; ++i) pairs.push_back(RandomPair(vocab_size, 8, 3, 50 + i));
  return pairs;
}

TEST_CASE("zero epochs leave the model unchanged") {
  Model m(TinyConfig(260));
  const auto before = ParameterChecksum(m);
  TrainConfig tc;
  tc.epochs = 0;
  const Vocab vocab = TrainBpe({"x"}, 260);
  Train(m, vocab, SmallPairs(260), tc);
  CHECK(ParameterChecksum(m) == before);
}

TEST_CASE("training is deterministic and reduces loss") {
  const Vocab vocab = TrainBpe({"x"}, 260);
  TrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 2;
  tc.learning_rate = 1e-2;
  tc.seed = 9;
  Model a(TinyConfig(260)), b(TinyConfig(260));
  const TrainHistory ha = Train(a, vocab, SmallPairs(260), tc);
  const TrainHistory hb = Train(b, vocab, SmallPairs(260), tc);
  CHECK(ParameterChecksum(a) == ParameterChecksum(b));
  CHECK(ha.epoch_loss == hb.epoch_loss);
  CHECK(ha.epoch_loss.back() < ha.epoch_loss.front());
  CHECK(ha.steps == 15);
  CHECK(ha.ToCsv().starts_with("epoch,loss\n1,"));
}

TEST_CASE("copy head is frozen when copy is off") {
  const Vocab vocab = TrainBpe({"x"}, 260);
  TrainConfig tc;
  tc.epochs = 2;
  tc.learning_rate = 1e-2;
  tc.copy_enabled = false;
  Model m(TinyConfig(260));
  const VectorT<float> w = m.params().copy_weight;
  const VectorT<float> b = m.params().copy_bias;
  const MatrixT<float> head = m.params().head_weight;
  Train(m, vocab, SmallPairs(260), tc);
  CHECK(m.params().copy_weight == w);
  CHECK(m.params().copy_bias == b);
  CHECK_FALSE(m.params().head_weight == head);
}

TEST_CASE("invalid configs are rejected") {
  TrainConfig tc;
  tc.batch_size = 0;
  CHECK_THROWS_AS(tc.Validate(), Error);
  tc = {};
  tc.learning_rate = -1;
  CHECK_THROWS_AS(tc.Validate(), Error);
}

TEST_CASE("divergence is reported") {
  Transformer<double> m(TinyConfig(300));
  m.params().head_bias(0) = std::numeric_limits<double>::quiet_NaN();
  const EncodedPair pair = RandomPair(300, 8, 3, 8);
  try {
    TeacherForcingLoss<double>(m, pair, false);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDivergence);
  }
}

}  // namespace
}  // namespace gensf
