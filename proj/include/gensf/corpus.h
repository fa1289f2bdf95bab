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

#ifndef GENSF_CORPUS_H_
#define GENSF_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gensf {

// A labeled value: a contiguous substring of the utterance given by byte
// offsets [start, end). Offsets are UTF-8 byte offsets, which coincide with
// character offsets for ASCII text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

// NULL (no value) or a span of the utterance.
struct SlotLabel {
  std::optional<Span> span;

  bool has_value() const { return span.has_value(); }
  bool operator==(const SlotLabel&) const = default;
};

struct SlotExample {
  std::string utterance;
  std::vector<std::string> requested_slots;
  // Slot keys absent from the map are NULL.
  std::map<std::string, SlotLabel> labels;

  // Surface string of a label, empty for NULL or missing keys.
  std::string Surface(const std::string& slot_key) const;
  bool operator==(const SlotExample&) const = default;
};

struct Dataset {
  std::string domain_name;
  std::set<std::string> slot_keys;
  std::vector<SlotExample> examples;

  bool operator==(const Dataset&) const = default;
};

// Throws Error(kValidation) listing every offending record.
void ValidateDataset(const Dataset& dataset);

// Native JSON-lines format, see docs/formats.md. An optional first line
// {"domain": ..., "slot_keys": [...]} declares the slot inventory; without it
// the inventory is the union of keys mentioned by the records.
Dataset LoadDataset(const std::string& path);
Dataset ParseDataset(const std::string& contents, const std::string& name);
std::string SerializeDataset(const Dataset& dataset);
void SaveDataset(const Dataset& dataset, const std::string& path);

// Adapter for the restaurants-8k JSON array layout (userInput.text,
// context.requestedSlots, labels[].valueSpan with code point offsets).
Dataset ImportRestaurants8k(const std::string& path);

// Keeps floor(|examples| / denominator) examples, uniformly without
// replacement, preserving their original order.
Dataset SplitFraction(const Dataset& dataset, int denominator,
                      std::uint64_t seed);

struct SynthConfig {
  std::size_t train_size = 2000;
  std::size_t test_size = 500;
  // Number of slot keys from the fixed inventory (1..5), in the order
  // date, time, people, first_name, last_name.
  std::size_t num_slots = 5;
};

struct SyntheticCorpus {
  Dataset train;
  Dataset test;
};

// Restaurant-booking style utterances with 0-3 filled slots. First and last
// names are drawn from disjoint train and test pools.
SyntheticCorpus GenerateSynthetic(const SynthConfig& config,
                                  std::uint64_t seed);

// Slot keys of the synthetic domain in canonical order.
const std::vector<std::string>& SyntheticSlotKeys();

}  // namespace gensf

#endif  // GENSF_CORPUS_H_
