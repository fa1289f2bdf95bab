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

#include "gensf/run_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "gensf/error.h"

namespace gensf {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename Int>
Int ParseInt(const std::string& key, const std::string& value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::kConfig, key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double out = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw Error(ErrorKind::kConfig, key + ": expected a number, got '" + value + "'");
  }
  return out;
}

bool ParseSwitch(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw Error(ErrorKind::kConfig, key + ": expected on/off, got '" + value + "'");
}

std::string Switch(bool v) { return v ? "on" : "off"; }

std::string Num(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field>& Fields() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    auto str = [&f](const std::string& key, std::string RunConfig::*member) {
      f[key] = {[member](RunConfig& c, const std::string& v) { c.*member = v; },
                [member](const RunConfig& c) { return c.*member; }};
    };
    auto integer = [&f](const std::string& key, auto RunConfig::*member) {
      using Int = std::remove_reference_t<decltype(std::declval<RunConfig&>().*member)>;
      f[key] = {[key, member](RunConfig& c, const std::string& v) { c.*member = ParseInt<Int>(key, v); },
                [member](const RunConfig& c) { return std::to_string(c.*member); }};
    };
    auto real = [&f](const std::string& key, double RunConfig::*member) {
      f[key] = {[key, member](RunConfig& c, const std::string& v) { c.*member = ParseDouble(key, v); },
                [member](const RunConfig& c) { return Num(c.*member); }};
    };
    auto flag = [&f](const std::string& key, bool RunConfig::*member) {
      f[key] = {[key, member](RunConfig& c, const std::string& v) { c.*member = ParseSwitch(key, v); },
                [member](const RunConfig& c) { return Switch(c.*member); }};
    };
    integer("seed", &RunConfig::seed);
    str("data", &RunConfig::data);
    str("test_data", &RunConfig::test_data);
    integer("fraction", &RunConfig::fraction);
    integer("synth_train", &RunConfig::synth_train);
    integer("synth_test", &RunConfig::synth_test);
    integer("synth_slots", &RunConfig::synth_slots);
    integer("vocab_size", &RunConfig::vocab_size);
    str("vocab", &RunConfig::vocab);
    integer("layers", &RunConfig::layers);
    integer("heads", &RunConfig::heads);
    integer("hidden_dim", &RunConfig::hidden_dim);
    integer("context_window", &RunConfig::context_window);
    real("learning_rate", &RunConfig::learning_rate);
    integer("epochs", &RunConfig::epochs);
    integer("batch_size", &RunConfig::batch_size);
    real("weight_decay", &RunConfig::weight_decay);
    real("clip_norm", &RunConfig::clip_norm);
    real("negative_keep", &RunConfig::negative_keep);
    str("template", &RunConfig::template_style);
    flag("copy", &RunConfig::copy);
    str("copy_source", &RunConfig::copy_source);
    flag("constrained", &RunConfig::constrained);
    flag("recover", &RunConfig::recover);
    real("recover_threshold", &RunConfig::recover_threshold);
    integer("max_span_tokens", &RunConfig::max_span_tokens);
    integer("max_len", &RunConfig::max_len);
    str("name_map", &RunConfig::name_map);
    str("domain", &RunConfig::domain);
    return f;
  }();
  return fields;
}

}  // namespace

void RunConfig::Set(const std::string& key, const std::string& value) {
  auto it = Fields().find(key);
  if (it == Fields().end()) throw Error(ErrorKind::kConfig, "unknown config key '" + key + "'");
  it->second.set(*this, value);
  if (key == "fraction") {
    const bool power_of_two = fraction >= 1 && fraction <= 128 && (fraction & (fraction - 1)) == 0;
    if (!power_of_two) throw Error(ErrorKind::kConfig, "fraction must be one of 1, 2, 4, ..., 128");
  }
  if (key == "template" && template_style != "natural" && template_style != "trivial") {
    throw Error(ErrorKind::kConfig, "template must be natural or trivial");
  }
  if (key == "copy_source" && copy_source != "utterance" && copy_source != "full-context") {
    throw Error(ErrorKind::kConfig, "copy_source must be utterance or full-context");
  }
}

void RunConfig::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "config file not found: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig, path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    Set(Trim(trimmed.substr(0, eq)), Trim(trimmed.substr(eq + 1)));
  }
}

void RunConfig::ApplyEnvironment() {
  if (const char* seed_env = std::getenv("GENSF_SEED"); seed_env != nullptr && *seed_env) {
    Set("seed", seed_env);
  }
}

std::string RunConfig::ToString() const {
  std::string out;
  for (const auto& [key, field] : Fields()) out += key + " = " + field.get(*this) + "\n";
  return out;
}

const std::vector<std::string>& RunConfig::Keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : Fields()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

ModelConfig RunConfig::Model(int vocab) const {
  ModelConfig c;
  c.layers = layers;
  c.heads = heads;
  c.hidden_dim = hidden_dim;
  c.context_window = context_window;
  c.vocab_size = vocab;
  c.seed = seed;
  c.Validate();
  return c;
}

TrainConfig RunConfig::Train() const {
  TrainConfig c;
  c.learning_rate = learning_rate;
  c.weight_decay = weight_decay;
  c.clip_norm = clip_norm;
  c.epochs = EpochsFor(fraction);
  c.batch_size = batch_size;
  c.seed = seed;
  c.copy_enabled = copy;
  c.copy_source = Source();
  c.template_style = Template();
  c.negative_keep = negative_keep;
  c.Validate();
  return c;
}

RecoveryConfig RunConfig::Recovery() const {
  RecoveryConfig c;
  c.threshold_ratio = recover_threshold;
  c.max_span_tokens = max_span_tokens;
  c.Validate();
  return c;
}

NameMap RunConfig::Names() const {
  return name_map.empty() ? DefaultNameMap(domain) : NameMap::Load(name_map);
}

PipelineConfig RunConfig::Pipeline() const {
  PipelineConfig p;
  p.copy_enabled = copy;
  p.constrained = constrained;
  p.recover_enabled = recover;
  p.template_style = Template();
  p.copy_source = Source();
  p.names = Names();
  p.recovery = Recovery();
  p.max_len = max_len;
  return p;
}

CopySource RunConfig::Source() const {
  return copy_source == "full-context" ? CopySource::kFullContext : CopySource::kUtterance;
}

TemplateStyle RunConfig::Template() const {
  return template_style == "trivial" ? TemplateStyle::kTrivial : TemplateStyle::kNatural;
}

int RunConfig::EpochsFor(int denominator) const {
  return epochs >= 0 ? epochs : EpochsForFraction(denominator);
}

std::vector<std::string> TokenizerCorpus(const Dataset& dataset, const NameMap& names) {
  std::vector<std::string> texts;
  for (const SlotExample& ex : dataset.examples) {
    texts.push_back(ex.utterance);
    for (const std::string& key : dataset.slot_keys) {
      if (names.Contains(key)) texts.push_back(RenderContext(ex, key, names).text);
    }
  }
  texts.push_back(" not provided");
  return texts;
}

}  // namespace gensf
