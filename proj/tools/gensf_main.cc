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

// gensf command line: synthesize, tokenizer train, train, eval, predict,
// ablate. Exit codes: 0 success, 1 runtime or validation failure, 2 usage.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gensf/corpus.h"
#include "gensf/error.h"
#include "gensf/eval.h"
#include "gensf/model.h"
#include "gensf/run_config.h"
#include "gensf/templating.h"
#include "gensf/tokenizer.h"
#include "gensf/training.h"

namespace {

using gensf::Error;
using gensf::ErrorKind;
using gensf::RunConfig;

void Log(const std::string& message) { std::cerr << "[gensf] " << message << "\n"; }

// Options bound to RunConfig keys. Values are applied after the config file
// so that flags win.
class Overrides {
 public:
  void Add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    CLI::Option* opt = app->add_option(flag, values_[key], help);
    options_.emplace_back(key, opt);
  }

  void Apply(RunConfig& config, std::set<std::string>& explicit_keys) const {
    for (const auto& [key, opt] : options_) {
      if (opt->count() == 0) continue;
      config.Set(key, values_.at(key));
      explicit_keys.insert(key);
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

struct Command {
  explicit Command(CLI::App* a) : app(a) {}

  CLI::App* app;
  Overrides overrides;
  std::string config_file;
};

void AddCommon(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_file, "key = value config file");
  cmd.overrides.Add(cmd.app, "--seed", "seed", "master random seed");
}

void AddModelFlags(Command& cmd) {
  cmd.overrides.Add(cmd.app, "--layers", "layers", "transformer layers");
  cmd.overrides.Add(cmd.app, "--heads", "heads", "attention heads");
  cmd.overrides.Add(cmd.app, "--hidden-dim", "hidden_dim", "hidden size");
  cmd.overrides.Add(cmd.app, "--context-window", "context_window", "maximum sequence length");
}

void AddTrainFlags(Command& cmd) {
  cmd.overrides.Add(cmd.app, "--fraction", "fraction", "train on 1/k of the data");
  cmd.overrides.Add(cmd.app, "--epochs", "epochs", "epochs (default: by fraction)");
  cmd.overrides.Add(cmd.app, "--lr", "learning_rate", "AdamW learning rate");
  cmd.overrides.Add(cmd.app, "--batch-size", "batch_size", "examples per step");
  cmd.overrides.Add(cmd.app, "--weight-decay", "weight_decay", "AdamW weight decay");
  cmd.overrides.Add(cmd.app, "--clip-norm", "clip_norm", "global gradient norm limit");
  cmd.overrides.Add(cmd.app, "--negative-keep", "negative_keep", "share of NULL targets kept");
  cmd.overrides.Add(cmd.app, "--vocab-size", "vocab_size", "tokenizer size when training one");
  cmd.overrides.Add(cmd.app, "--vocab", "vocab", "existing tokenizer file");
}

void AddPipelineFlags(Command& cmd) {
  cmd.overrides.Add(cmd.app, "--copy", "copy", "copy head on/off");
  cmd.overrides.Add(cmd.app, "--copy-source", "copy_source", "utterance or full-context");
  cmd.overrides.Add(cmd.app, "--constrained", "constrained", "constrained decoding on/off");
  cmd.overrides.Add(cmd.app, "--recover", "recover", "span recovery on/off");
  cmd.overrides.Add(cmd.app, "--recover-threshold", "recover_threshold",
                    "edit distance limit as a share of value length");
  cmd.overrides.Add(cmd.app, "--max-span-tokens", "max_span_tokens", "longest candidate span");
  cmd.overrides.Add(cmd.app, "--max-len", "max_len", "generation length limit");
  cmd.overrides.Add(cmd.app, "--template", "template", "natural or trivial");
  cmd.overrides.Add(cmd.app, "--name-map", "name_map", "slot name map file");
  cmd.overrides.Add(cmd.app, "--domain", "domain", "domain for the built-in name map");
}

RunConfig Resolve(const Command& cmd, std::set<std::string>& explicit_keys) {
  RunConfig config;
  config.ApplyEnvironment();
  if (!cmd.config_file.empty()) config.LoadFile(cmd.config_file);
  cmd.overrides.Apply(config, explicit_keys);
  return config;
}

void LogConfig(const RunConfig& config) {
  std::istringstream lines(config.ToString());
  std::string line;
  Log("resolved config:");
  while (std::getline(lines, line)) std::cerr << "  " << line << "\n";
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

gensf::Dataset LoadData(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorKind::kUsage, std::string("missing --") + what);
  return gensf::LoadDataset(path);
}

gensf::NameMap NamesFor(RunConfig& config, const std::set<std::string>& explicit_keys,
                        const gensf::Dataset& data) {
  if (!explicit_keys.contains("domain") && !data.domain_name.empty() && config.name_map.empty()) {
    config.domain = data.domain_name;
  }
  gensf::NameMap names = config.Names();
  names.CheckCovers(data.slot_keys);
  return names;
}

gensf::Vocab VocabFor(const RunConfig& config, const gensf::Dataset& data,
                      const gensf::NameMap& names) {
  if (!config.vocab.empty()) return gensf::Vocab::Load(config.vocab);
  Log("training tokenizer, vocab size " + std::to_string(config.vocab_size));
  return gensf::TrainBpe(gensf::TokenizerCorpus(data, names), config.vocab_size);
}

// Applies template, name map and copy source recorded in a checkpoint unless
// the user chose them.
void AdoptCheckpoint(const gensf::Checkpoint& ckpt, RunConfig& config,
                     const std::set<std::string>& explicit_keys, gensf::PipelineConfig& pipeline) {
  const auto& meta = ckpt.metadata;
  if (auto it = meta.find("template"); it != meta.end() && !explicit_keys.contains("template")) {
    config.Set("template", it->second);
    pipeline.template_style = config.Template();
  }
  if (auto it = meta.find("copy_source");
      it != meta.end() && !explicit_keys.contains("copy_source")) {
    config.Set("copy_source", it->second);
    pipeline.copy_source = config.Source();
  }
  if (auto it = meta.find("name_map"); it != meta.end() && !explicit_keys.contains("name_map") &&
                                       !explicit_keys.contains("domain")) {
    pipeline.names = gensf::NameMap::Parse(it->second);
  }
}

void ApplyPreset(const std::string& preset, RunConfig& config) {
  if (preset.empty()) return;
  if (preset == "full" || preset == "fewshot") {
    config.copy = config.constrained = config.recover = true;
  } else if (preset == "zeroshot") {
    config.copy = false;
    config.constrained = config.recover = true;
  } else {
    throw Error(ErrorKind::kUsage, "unknown preset '" + preset + "' (full, fewshot, zeroshot)");
  }
}

int RunSynthesize(Command& cmd, const std::string& out_dir) {
  std::set<std::string> explicit_keys;
  RunConfig config = Resolve(cmd, explicit_keys);
  LogConfig(config);
  gensf::SynthConfig synth{config.synth_train, config.synth_test, config.synth_slots};
  const auto corpus = gensf::GenerateSynthetic(synth, config.seed);
  std::filesystem::create_directories(out_dir);
  gensf::SaveDataset(corpus.train, out_dir + "/train.jsonl");
  gensf::SaveDataset(corpus.test, out_dir + "/test.jsonl");
  Log("wrote " + std::to_string(corpus.train.examples.size()) + " train and " +
      std::to_string(corpus.test.examples.size()) + " test examples to " + out_dir);
  return 0;
}

int RunTokenizer(Command& cmd, const std::string& out) {
  std::set<std::string> explicit_keys;
  RunConfig config = Resolve(cmd, explicit_keys);
  LogConfig(config);
  const gensf::Dataset data = LoadData(config.data, "data");
  const gensf::NameMap names = NamesFor(config, explicit_keys, data);
  const gensf::Vocab vocab = gensf::TrainBpe(gensf::TokenizerCorpus(data, names), config.vocab_size);
  vocab.Save(out);
  Log("tokenizer with " + std::to_string(vocab.size()) + " entries written to " + out);
  return 0;
}

int RunTrain(Command& cmd, const std::string& out, const std::string& history_path) {
  std::set<std::string> explicit_keys;
  RunConfig config = Resolve(cmd, explicit_keys);
  LogConfig(config);
  const gensf::Dataset full = LoadData(config.data, "data");
  const gensf::NameMap names = NamesFor(config, explicit_keys, full);
  const gensf::Dataset data =
      gensf::SplitFraction(full, config.fraction, config.seed);
  Log("training on " + std::to_string(data.examples.size()) + " of " +
      std::to_string(full.examples.size()) + " examples");
  const gensf::Vocab vocab = VocabFor(config, full, names);
  gensf::Model model(config.Model(vocab.size()));
  const gensf::TrainConfig train = config.Train();

  const auto start = std::chrono::steady_clock::now();
  gensf::TrainHistory history =
      gensf::Train(model, vocab, data, names, train, [&](int epoch, double loss) {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char buf[96];
        std::snprintf(buf, sizeof(buf), "epoch %d/%d loss %.5f (%.0fs)", epoch, train.epochs, loss,
                      secs);
        Log(buf);
      });

  std::map<std::string, std::string> meta = {
      {"template", config.template_style},
      {"copy", config.copy ? "on" : "off"},
      {"copy_source", config.copy_source},
      {"name_map", names.Serialize()},
      {"domain", full.domain_name},
      {"fraction", std::to_string(config.fraction)},
      {"epochs", std::to_string(train.epochs)},
      {"seed", std::to_string(config.seed)},
  };
  gensf::SaveCheckpoint(out, model, vocab, meta);
  Log("checkpoint written to " + out);
  if (!history_path.empty()) {
    history.checkpoint = out;
    WriteText(history_path, history.ToCsv());
  }
  return 0;
}

int RunEval(Command& cmd, const std::string& checkpoint, const std::string& preset,
            const std::string& csv) {
  std::set<std::string> explicit_keys;
  RunConfig config = Resolve(cmd, explicit_keys);
  ApplyPreset(preset, config);
  cmd.overrides.Apply(config, explicit_keys);  // explicit flags beat the preset
  const gensf::Dataset test = LoadData(config.test_data.empty() ? config.data : config.test_data,
                                       "data");
  gensf::PipelineConfig pipeline;
  std::optional<gensf::Checkpoint> ckpt;
  if (!checkpoint.empty()) {
    ckpt = gensf::LoadCheckpoint(checkpoint);
  } else if (preset != "zeroshot") {
    throw Error(ErrorKind::kUsage, "--checkpoint is required unless --preset zeroshot");
  }
  const gensf::NameMap names = NamesFor(config, explicit_keys, test);
  pipeline = config.Pipeline();
  pipeline.names = names;
  if (ckpt) AdoptCheckpoint(*ckpt, config, explicit_keys, pipeline);
  LogConfig(config);

  gensf::EvalReport report;
  if (ckpt) {
    report = gensf::Evaluate(ckpt->model, ckpt->vocab, test, pipeline);
  } else {
    // Zero-shot without a checkpoint: an untrained model over a tokenizer
    // built from the test utterances or the one given by --vocab.
    const gensf::Vocab vocab = VocabFor(config, test, names);
    const gensf::Model model(config.Model(vocab.size()));
    report = gensf::Evaluate(model, vocab, test, pipeline);
  }
  std::cout << report.ToTable();
  if (!csv.empty()) WriteText(csv, report.ToCsv());
  return 0;
}

int RunPredict(Command& cmd, const std::string& checkpoint, const std::string& utterance,
               const std::string& slot, const std::vector<std::string>& requested) {
  std::set<std::string> explicit_keys;
  RunConfig config = Resolve(cmd, explicit_keys);
  if (checkpoint.empty()) throw Error(ErrorKind::kUsage, "missing --checkpoint");
  const gensf::Checkpoint ckpt = gensf::LoadCheckpoint(checkpoint);
  gensf::PipelineConfig pipeline = config.Pipeline();
  AdoptCheckpoint(ckpt, config, explicit_keys, pipeline);
  LogConfig(config);

  gensf::SlotExample example;
  example.utterance = utterance;
  example.requested_slots = requested;
  const gensf::SlotTrace trace = gensf::PredictSlot(ckpt.model, ckpt.vocab, example, slot, pipeline);
  std::cout << "context: " << trace.context.text << "\n";
  std::cout << "generated: " << trace.generation.text << "\n";
  std::cout << "value: " << (trace.value ? *trace.value : std::string("NULL")) << "\n";
  return 0;
}

int RunAblate(Command& cmd, const std::string& grid, const std::string& csv) {
  std::set<std::string> explicit_keys;
  RunConfig config = Resolve(cmd, explicit_keys);
  if (grid != "default") throw Error(ErrorKind::kUsage, "unknown grid '" + grid + "'");
  LogConfig(config);
  gensf::Dataset train, test;
  if (config.data.empty()) {
    const auto corpus = gensf::GenerateSynthetic(
        {config.synth_train, config.synth_test, config.synth_slots}, config.seed);
    train = corpus.train;
    test = corpus.test;
  } else {
    train = LoadData(config.data, "data");
    test = LoadData(config.test_data, "test-data");
  }
  const gensf::NameMap names = NamesFor(config, explicit_keys, train);
  const gensf::Vocab vocab = VocabFor(config, train, names);

  gensf::AblationSetup setup;
  setup.model = config.Model(vocab.size());
  setup.train = config.Train();
  setup.epochs_override = config.epochs;
  setup.names = names;
  setup.recovery = config.Recovery();
  setup.seed = config.seed;
  setup.max_len = config.max_len;
  const gensf::AblationResult result =
      gensf::RunAblation(setup, vocab, train, test, gensf::DefaultAblationSplits());
  std::cout << result.ToTable();
  if (!csv.empty()) WriteText(csv, result.ToCsv());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slot filling as response generation"};
  app.require_subcommand(1);

  Command synth{app.add_subcommand("synthesize", "generate the synthetic corpus")};
  std::string synth_out = "data";
  AddCommon(synth);
  synth.app->add_option("--out-dir", synth_out, "directory for train.jsonl and test.jsonl");
  synth.overrides.Add(synth.app, "--train-size", "synth_train", "training examples");
  synth.overrides.Add(synth.app, "--test-size", "synth_test", "test examples");
  synth.overrides.Add(synth.app, "--slots", "synth_slots", "slot keys (1-5)");

  CLI::App* tokenizer = app.add_subcommand("tokenizer", "tokenizer tools");
  tokenizer->require_subcommand(1);
  Command tok_train{tokenizer->add_subcommand("train", "train a byte-level BPE tokenizer")};
  std::string tok_out;
  AddCommon(tok_train);
  tok_train.overrides.Add(tok_train.app, "--data", "data", "training dataset (JSONL)");
  tok_train.overrides.Add(tok_train.app, "--vocab-size", "vocab_size", "final vocabulary size");
  tok_train.overrides.Add(tok_train.app, "--name-map", "name_map", "slot name map file");
  tok_train.app->add_option("--out", tok_out, "output tokenizer file")->required();

  Command train{app.add_subcommand("train", "train a model")};
  std::string train_out, history;
  AddCommon(train);
  AddModelFlags(train);
  AddTrainFlags(train);
  train.overrides.Add(train.app, "--data", "data", "training dataset (JSONL)");
  train.overrides.Add(train.app, "--copy", "copy", "copy head on/off");
  train.overrides.Add(train.app, "--copy-source", "copy_source", "utterance or full-context");
  train.overrides.Add(train.app, "--template", "template", "natural or trivial");
  train.overrides.Add(train.app, "--name-map", "name_map", "slot name map file");
  train.overrides.Add(train.app, "--domain", "domain", "domain for the built-in name map");
  train.app->add_option("--out", train_out, "checkpoint path")->required();
  train.app->add_option("--history", history, "per-epoch loss CSV");

  Command eval{app.add_subcommand("eval", "score a model on a dataset")};
  std::string eval_ckpt, preset, eval_csv;
  AddCommon(eval);
  AddModelFlags(eval);
  AddPipelineFlags(eval);
  eval.overrides.Add(eval.app, "--data", "test_data", "evaluation dataset (JSONL)");
  eval.overrides.Add(eval.app, "--vocab", "vocab", "tokenizer for zero-shot runs");
  eval.overrides.Add(eval.app, "--vocab-size", "vocab_size", "tokenizer size for zero-shot runs");
  eval.app->add_option("--checkpoint", eval_ckpt, "checkpoint path");
  eval.app->add_option("--preset", preset, "full, fewshot or zeroshot");
  eval.app->add_option("--csv", eval_csv, "write per-slot scores as CSV");

  Command predict{app.add_subcommand("predict", "fill one slot of one utterance")};
  std::string pred_ckpt, utterance, slot;
  std::vector<std::string> requested;
  AddCommon(predict);
  AddPipelineFlags(predict);
  predict.app->add_option("--checkpoint", pred_ckpt, "checkpoint path")->required();
  predict.app->add_option("--utterance", utterance, "user utterance")->required();
  predict.app->add_option("--slot", slot, "slot key")->required();
  predict.app->add_option("--requested", requested, "requested slot keys")->delimiter(',');

  Command ablate{app.add_subcommand("ablate", "component ablation grid")};
  std::string grid = "default", ablate_csv;
  AddCommon(ablate);
  AddModelFlags(ablate);
  AddTrainFlags(ablate);
  ablate.overrides.Add(ablate.app, "--data", "data", "training dataset (default: synthetic)");
  ablate.overrides.Add(ablate.app, "--test-data", "test_data", "test dataset");
  ablate.overrides.Add(ablate.app, "--name-map", "name_map", "slot name map file");
  ablate.app->add_option("--grid", grid, "grid name");
  ablate.app->add_option("--csv", ablate_csv, "write the grid as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth.app->parsed()) return RunSynthesize(synth, synth_out);
    if (tok_train.app->parsed()) return RunTokenizer(tok_train, tok_out);
    if (train.app->parsed()) return RunTrain(train, train_out, history);
    if (eval.app->parsed()) return RunEval(eval, eval_ckpt, preset, eval_csv);
    if (predict.app->parsed()) return RunPredict(predict, pred_ckpt, utterance, slot, requested);
    if (ablate.app->parsed()) return RunAblate(ablate, grid, ablate_csv);
  } catch (const Error& e) {
    std::cerr << "error: " << gensf::ErrorKindName(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::kUsage || e.kind() == ErrorKind::kConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
