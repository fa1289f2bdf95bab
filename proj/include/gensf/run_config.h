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

#ifndef GENSF_RUN_CONFIG_H_
#define GENSF_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gensf/corpus.h"
#include "gensf/eval.h"
#include "gensf/model.h"
#include "gensf/postprocess.h"
#include "gensf/training.h"

namespace gensf {

// Every setting the CLI understands, with defaults. Resolution order:
// built-in defaults, then GENSF_SEED, then the config file, then flags.
struct RunConfig {
  std::uint64_t seed = 7;

  // corpus
  std::string data;
  std::string test_data;
  int fraction = 1;  // train on 1/fraction of the data
  std::size_t synth_train = 2000;
  std::size_t synth_test = 500;
  std::size_t synth_slots = 5;

  // tokenizer
  int vocab_size = Vocab::kBaseSize + 512;
  std::string vocab;

  // model
  int layers = 2;
  int heads = 4;
  int hidden_dim = 128;
  int context_window = 128;

  // training
  double learning_rate = 5e-5;
  int epochs = -1;  // -1: schedule by fraction
  int batch_size = 16;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  double negative_keep = 1.0;
  std::string template_style = "natural";

  // pipeline
  bool copy = true;
  std::string copy_source = "utterance";
  bool constrained = true;
  bool recover = true;
  double recover_threshold = 0.3;
  std::size_t max_span_tokens = 10;
  int max_len = 16;
  std::string name_map;
  std::string domain = "synthetic";

  // Sets one key from its string form; throws Error(kConfig) for unknown
  // keys or malformed values.
  void Set(const std::string& key, const std::string& value);
  // `key = value` lines, '#' comments.
  void LoadFile(const std::string& path);
  void ApplyEnvironment();
  // Sorted `key = value` lines for every key.
  std::string ToString() const;
  static const std::vector<std::string>& Keys();

  ModelConfig Model(int vocab_size) const;
  TrainConfig Train() const;
  RecoveryConfig Recovery() const;
  NameMap Names() const;
  PipelineConfig Pipeline() const;
  CopySource Source() const;
  TemplateStyle Template() const;
  int EpochsFor(int denominator) const;
};

// Texts a tokenizer for `dataset` is trained on: each utterance, every
// rendered context, and the "not provided" target.
std::vector<std::string> TokenizerCorpus(const Dataset& dataset, const NameMap& names);

}  // namespace gensf

#endif  // GENSF_RUN_CONFIG_H_
