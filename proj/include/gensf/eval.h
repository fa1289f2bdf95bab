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

#ifndef GENSF_EVAL_H_
#define GENSF_EVAL_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gensf/corpus.h"
#include "gensf/decoding.h"
#include "gensf/model.h"
#include "gensf/postprocess.h"
#include "gensf/templating.h"
#include "gensf/tokenizer.h"
#include "gensf/training.h"

namespace gensf {

struct PipelineConfig {
  bool copy_enabled = true;
  bool constrained = true;
  bool recover_enabled = true;
  TemplateStyle template_style = TemplateStyle::kNatural;
  CopySource copy_source = CopySource::kUtterance;
  NameMap names;
  RecoveryConfig recovery;
  int max_len = 16;

  enum class Preset { kFull, kFewShot, kZeroShot };
  // Full and few-shot use every component; zero-shot drops the copy head and
  // keeps constrained decoding and span recovery.
  static PipelineConfig FromPreset(Preset preset, NameMap names);
};

// Slot key -> predicted value; nullopt is NULL.
using SlotPredictions = std::map<std::string, std::optional<std::string>>;

// Per slot: render, decode (constrained or greedy), then recover a span.
// "not provided" and empty generations are NULL.
SlotPredictions PredictSlots(const Model& model, const Vocab& vocab, const SlotExample& example,
                             const std::set<std::string>& slot_keys, const PipelineConfig& config);

// Full trace of one slot prediction, for the CLI.
struct SlotTrace {
  ContextText context;
  Generation generation;
  std::optional<std::string> value;
};
SlotTrace PredictSlot(const Model& model, const Vocab& vocab, const SlotExample& example,
                      const std::string& slot_key, const PipelineConfig& config);

struct SlotScore {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0;  // percentages
  double recall = 0;
  double f1 = 0;
};

struct EvalReport {
  std::map<std::string, SlotScore> slots;
  double macro_f1 = 0;

  std::string ToCsv() const;
  std::string ToTable() const;
};

// Precision, recall and F1 in percent from counts; 0 where undefined.
SlotScore ScoreFromCounts(long tp, long fp, long fn);

// Exact match after lowercasing and trimming both sides. A non-NULL
// prediction equal to gold is a TP, any other non-NULL prediction is an FP,
// and a NULL prediction against a non-NULL gold is an FN. Throws
// Error(kValidation) for predictions keyed by an unknown slot.
EvalReport SlotF1(const std::vector<SlotPredictions>& predictions,
                  const std::vector<SlotExample>& gold, const std::set<std::string>& slot_keys);

EvalReport Evaluate(const Model& model, const Vocab& vocab, const Dataset& test,
                    const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Ablation grid.

struct AblationCell {
  bool copy_enabled = true;
  bool constrained = true;
  bool recover_enabled = true;
  TemplateStyle template_style = TemplateStyle::kNatural;

  std::string Label() const;
};

struct AblationSplit {
  std::string name;        // "full", "1/16", "zero-shot"
  int denominator = 1;     // training fraction 1/k
  bool zero_shot = false;  // no training; copy head unavailable
};

struct AblationResult {
  std::vector<AblationCell> rows;
  std::vector<AblationSplit> columns;
  // results[row][column]; nullopt where a cell does not apply.
  std::vector<std::vector<std::optional<EvalReport>>> results;

  std::string ToCsv() const;
  std::string ToTable() const;
};

struct AblationSetup {
  ModelConfig model;
  TrainConfig train;  // epochs < 0 selects EpochsForFraction per split
  int epochs_override = -1;
  NameMap names;
  RecoveryConfig recovery;
  std::uint64_t seed = 0;
  int max_len = 16;
};

// The 16-row {copy} x {constrained} x {recover} x {template} grid over the
// given splits. One model is trained per (split, copy, template); the
// decoding flags are inference-only.
AblationResult RunAblation(const AblationSetup& setup, const Vocab& vocab, const Dataset& train,
                           const Dataset& test, const std::vector<AblationSplit>& splits);

std::vector<AblationSplit> DefaultAblationSplits();

}  // namespace gensf

#endif  // GENSF_EVAL_H_
