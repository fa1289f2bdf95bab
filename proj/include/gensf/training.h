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

#ifndef GENSF_TRAINING_H_
#define GENSF_TRAINING_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gensf/corpus.h"
#include "gensf/decoding.h"
#include "gensf/model.h"
#include "gensf/templating.h"
#include "gensf/tokenizer.h"

namespace gensf {

// Natural-language dialog templates or the key/value baseline.
enum class TemplateStyle { kNatural, kTrivial };

struct TrainingPair {
  std::size_t example_index = 0;
  std::string slot_key;
  ContextText context;
  TargetText target;
  SlotLabel label;
};

// One pair per (example, slot key): labeled slots target their span, every
// other key targets "not provided". `negative_keep` < 1 keeps that share of
// the negatives, chosen with `seed`.
std::vector<TrainingPair> BuildTrainingPairs(const Dataset& dataset, const NameMap& names,
                                             TemplateStyle style = TemplateStyle::kNatural,
                                             double negative_keep = 1.0,
                                             std::uint64_t seed = 0);

// Teacher-forcing sequence: inputs = context + target[:-1], labels[p] is the
// token after position p. Only positions >= context_size - 1 are scored.
struct EncodedPair {
  std::vector<TokenId> inputs;
  std::vector<TokenId> labels;
  std::size_t context_size = 0;
  SourceMask copy_mask;

  std::size_t target_size() const { return inputs.size() + 1 - context_size; }
};

EncodedPair EncodePair(const Vocab& vocab, const TrainingPair& pair, const std::string& utterance,
                       CopySource source = CopySource::kUtterance);

struct LossResult {
  double nll_sum = 0;  // summed over target tokens
  std::size_t tokens = 0;
  double mean() const { return tokens ? nll_sum / static_cast<double>(tokens) : 0.0; }
};

// Mean negative log-likelihood of the target tokens under P_final (or P_vocab
// with the copy head off). Throws Error(kDivergence) on a non-finite value.
template <typename T>
double TeacherForcingLoss(const Transformer<T>& model, const EncodedPair& pair, bool copy_enabled);

// Adds `weight` * d(summed target NLL)/dparams into `grads`.
template <typename T>
LossResult LossAndGradient(const Transformer<T>& model, const EncodedPair& pair,
                           bool copy_enabled, T weight, Parameters<T>& grads,
                           ForwardCache<T>* cache = nullptr);

// Epochs per training-set fraction 1/k: 10 for the full set, 20 down to
// 1/16, 40 below that.
int EpochsForFraction(int denominator);

struct TrainConfig {
  double learning_rate = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  int epochs = 10;
  int batch_size = 16;
  std::uint64_t seed = 0;
  bool copy_enabled = true;
  CopySource copy_source = CopySource::kUtterance;
  TemplateStyle template_style = TemplateStyle::kNatural;
  double negative_keep = 1.0;

  void Validate() const;
};

struct TrainHistory {
  std::vector<double> epoch_loss;  // mean per target token
  std::size_t steps = 0;
  std::string checkpoint;

  std::string ToCsv() const;
};

class AdamW {
 public:
  AdamW(const TrainConfig& config, Parameters<float>& params);

  // Updates every tensor for which `include(tensor)` is true.
  void Step(Parameters<float>& params, Parameters<float>& grads,
            const std::function<bool(const TensorRef<float>&)>& include);

 private:
  TrainConfig config_;
  std::vector<std::vector<float>> m_, v_;
  long step_ = 0;
};

// Scales gradients so their global L2 norm is at most max_norm; returns the
// norm before clipping.
double ClipGradNorm(Parameters<float>& grads, double max_norm);

using EpochCallback = std::function<void(int epoch, double loss)>;

// Shuffles pairs each epoch with the seeded "shuffle" stream, accumulates
// token-mean gradients over batches, clips, and steps AdamW. With the copy
// head disabled its parameters are never touched.
TrainHistory Train(Model& model, const Vocab& vocab, const std::vector<EncodedPair>& pairs,
                   const TrainConfig& config, const EpochCallback& on_epoch = {});

TrainHistory Train(Model& model, const Vocab& vocab, const Dataset& dataset, const NameMap& names,
                   const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace gensf

#endif  // GENSF_TRAINING_H_
