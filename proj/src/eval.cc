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

#include <array>
#include <cstdio>
#include <sstream>

#include "gensf/error.h"

namespace gensf {
namespace {

std::string Fixed(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ContextText RenderFor(const SlotExample& example, const std::string& key,
                      const PipelineConfig& config) {
  return config.template_style == TemplateStyle::kNatural
             ? RenderContext(example, key, config.names)
             : RenderTrivialContext(example, key);
}

}  // namespace

PipelineConfig PipelineConfig::FromPreset(Preset preset, NameMap names) {
  PipelineConfig config;
  config.names = std::move(names);
  if (preset == Preset::kZeroShot) config.copy_enabled = false;
  return config;
}

SlotTrace PredictSlot(const Model& model, const Vocab& vocab, const SlotExample& example,
                      const std::string& slot_key, const PipelineConfig& config) {
  SlotTrace trace;
  trace.context = RenderFor(example, slot_key, config);
  const EncodedContext encoded = EncodeContext(vocab, trace.context, config.copy_source);
  const DecodeOptions options{config.copy_enabled, config.max_len};
  trace.generation = config.constrained
                         ? ConstrainedDecode(model, vocab, encoded,
                                             AllowedTokenSet(vocab, encoded.utterance_tokens), options)
                         : GreedyDecode(model, vocab, encoded, options);
  const std::string& text = trace.generation.text;
  if (config.recover_enabled) {
    RecoveredValue r = RecoverSpan(text, example.utterance, encoded.utterance_tokens,
                                   config.recovery);
    // Constrained output is built from utterance tokens, so a value that
    // misses the threshold still maps to its nearest span.
    if (r.kind == RecoveredValue::Kind::kRaw && config.constrained && !NormalizeValue(text).empty()) {
      r = NearestSpan(text, example.utterance, encoded.utterance_tokens, config.recovery);
    }
    if (!r.is_null() && !NormalizeValue(r.text).empty()) trace.value = r.text;
  } else if (!text.empty() && NormalizeValue(text) != kNotProvided) {
    trace.value = text;
  }
  return trace;
}

SlotPredictions PredictSlots(const Model& model, const Vocab& vocab, const SlotExample& example,
                             const std::set<std::string>& slot_keys, const PipelineConfig& config) {
  SlotPredictions out;
  for (const std::string& key : slot_keys) {
    out[key] = PredictSlot(model, vocab, example, key, config).value;
  }
  return out;
}

SlotScore ScoreFromCounts(long tp, long fp, long fn) {
  SlotScore s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.precision = tp + fp > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

EvalReport SlotF1(const std::vector<SlotPredictions>& predictions,
                  const std::vector<SlotExample>& gold, const std::set<std::string>& slot_keys) {
  if (predictions.size() != gold.size()) {
    throw Error(ErrorKind::kValidation, "prediction and gold counts differ");
  }
  std::map<std::string, std::array<long, 3>> counts;
  for (const std::string& key : slot_keys) counts[key] = {0, 0, 0};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const auto& [key, value] : predictions[i]) {
      if (!slot_keys.contains(key)) {
        throw Error(ErrorKind::kValidation, "prediction for unknown slot '" + key + "'");
      }
    }
    for (const std::string& key : slot_keys) {
      const std::string gold_value = gold[i].Surface(key);
      auto it = predictions[i].find(key);
      const bool predicted = it != predictions[i].end() && it->second.has_value();
      auto& c = counts[key];
      if (predicted) {
        if (!gold_value.empty() && NormalizeValue(*it->second) == NormalizeValue(gold_value)) {
          ++c[0];
        } else {
          ++c[1];
        }
      } else if (!gold_value.empty()) {
        ++c[2];
      }
    }
  }
  EvalReport report;
  double sum = 0;
  for (const auto& [key, c] : counts) {
    report.slots[key] = ScoreFromCounts(c[0], c[1], c[2]);
    sum += report.slots[key].f1;
  }
  report.macro_f1 = counts.empty() ? 0.0 : sum / static_cast<double>(counts.size());
  return report;
}

EvalReport Evaluate(const Model& model, const Vocab& vocab, const Dataset& test,
                    const PipelineConfig& config) {
  std::vector<SlotPredictions> predictions;
  predictions.reserve(test.examples.size());
  for (const SlotExample& ex : test.examples) {
    predictions.push_back(PredictSlots(model, vocab, ex, test.slot_keys, config));
  }
  return SlotF1(predictions, test.examples, test.slot_keys);
}

std::string EvalReport::ToCsv() const {
  std::ostringstream out;
  out << "slot,tp,fp,fn,precision,recall,f1\n";
  for (const auto& [key, s] : slots) {
    out << key << ',' << s.tp << ',' << s.fp << ',' << s.fn << ',' << Fixed(s.precision, 4) << ','
        << Fixed(s.recall, 4) << ',' << Fixed(s.f1, 4) << '\n';
  }
  out << "macro,,,,,," << Fixed(macro_f1, 4) << '\n';
  return out.str();
}

std::string EvalReport::ToTable() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %6s %6s %6s %8s %8s %8s\n", "slot", "TP", "FP", "FN",
                "P", "R", "F1");
  out << line;
  for (const auto& [key, s] : slots) {
    std::snprintf(line, sizeof(line), "%-16s %6ld %6ld %6ld %8.2f %8.2f %8.2f\n", key.c_str(), s.tp,
                  s.fp, s.fn, s.precision, s.recall, s.f1);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-16s %6s %6s %6s %8s %8s %8.2f\n", "macro", "", "", "", "",
                "", macro_f1);
  out << line;
  return out.str();
}

// ---------------------------------------------------------------------------

std::string AblationCell::Label() const {
  std::string s;
  s += copy_enabled ? "copy" : "-copy";
  s += constrained ? " constrained" : " -constrained";
  s += recover_enabled ? " recover" : " -recover";
  s += template_style == TemplateStyle::kNatural ? " nl-template" : " -nl-template";
  return s;
}

std::vector<AblationSplit> DefaultAblationSplits() {
  return {{"full", 1, false}, {"1/16", 16, false}, {"zero-shot", 1, true}};
}

AblationResult RunAblation(const AblationSetup& setup, const Vocab& vocab, const Dataset& train,
                           const Dataset& test, const std::vector<AblationSplit>& splits) {
  AblationResult result;
  for (int copy = 1; copy >= 0; --copy) {
    for (int constrained = 1; constrained >= 0; --constrained) {
      for (int recover = 1; recover >= 0; --recover) {
        for (int natural = 1; natural >= 0; --natural) {
          result.rows.push_back({copy == 1, constrained == 1, recover == 1,
                                 natural ? TemplateStyle::kNatural : TemplateStyle::kTrivial});
        }
      }
    }
  }
  result.columns = splits;
  result.results.assign(result.rows.size(),
                        std::vector<std::optional<EvalReport>>(splits.size()));

  for (std::size_t col = 0; col < splits.size(); ++col) {
    const AblationSplit& split = splits[col];
    const Dataset data = split.zero_shot ? train : SplitFraction(train, split.denominator, setup.seed);
    for (int copy = 1; copy >= 0; --copy) {
      if (split.zero_shot && copy == 1) continue;
      for (int natural = 1; natural >= 0; --natural) {
        const TemplateStyle style = natural ? TemplateStyle::kNatural : TemplateStyle::kTrivial;
        ModelConfig mc = setup.model;
        mc.seed = setup.seed;
        Model model(mc);
        if (!split.zero_shot) {
          TrainConfig tc = setup.train;
          tc.seed = setup.seed;
          tc.copy_enabled = copy == 1;
          tc.template_style = style;
          tc.epochs = setup.epochs_override >= 0 ? setup.epochs_override
                                                 : EpochsForFraction(split.denominator);
          Train(model, vocab, data, setup.names, tc);
        }
        for (std::size_t row = 0; row < result.rows.size(); ++row) {
          const AblationCell& cell = result.rows[row];
          if (cell.copy_enabled != (copy == 1) || cell.template_style != style) continue;
          PipelineConfig pc;
          pc.copy_enabled = cell.copy_enabled;
          pc.constrained = cell.constrained;
          pc.recover_enabled = cell.recover_enabled;
          pc.template_style = style;
          pc.names = setup.names;
          pc.recovery = setup.recovery;
          pc.max_len = setup.max_len;
          result.results[row][col] = Evaluate(model, vocab, test, pc);
        }
      }
    }
  }
  return result;
}

std::string AblationResult::ToCsv() const {
  std::ostringstream out;
  out << "copy,constrained,recover,template";
  for (const AblationSplit& s : columns) out << ',' << s.name;
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const AblationCell& c = rows[r];
    out << (c.copy_enabled ? "on" : "off") << ',' << (c.constrained ? "on" : "off") << ','
        << (c.recover_enabled ? "on" : "off") << ','
        << (c.template_style == TemplateStyle::kNatural ? "natural" : "trivial");
    for (const auto& cell : results[r]) out << ',' << (cell ? Fixed(cell->macro_f1, 4) : "");
    out << '\n';
  }
  return out.str();
}

std::string AblationResult::ToTable() const {
  std::ostringstream out;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-44s", "configuration");
  out << buf;
  for (const AblationSplit& s : columns) {
    std::snprintf(buf, sizeof(buf), " %10s", s.name.c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%-44s", rows[r].Label().c_str());
    out << buf;
    for (const auto& cell : results[r]) {
      std::snprintf(buf, sizeof(buf), " %10s", cell ? Fixed(cell->macro_f1, 1).c_str() : "-");
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gensf
