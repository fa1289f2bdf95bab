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

#ifndef GENSF_TEMPLATING_H_
#define GENSF_TEMPLATING_H_

#include <map>
#include <string>
#include <string_view>

#include "gensf/corpus.h"

namespace gensf {

// Reserved end-of-sequence marker as it appears in rendered text.
inline constexpr std::string_view kEosMarker = "[EOS]";
inline constexpr std::string_view kNotProvided = "not provided";

// Slot key -> natural-language phrase.
class NameMap {
 public:
  NameMap() = default;
  explicit NameMap(std::map<std::string, std::string> phrases);

  // Throws Error(kConfig) naming the key when it is unknown.
  const std::string& Phrase(const std::string& slot_key) const;
  bool Contains(const std::string& slot_key) const { return phrases_.contains(slot_key); }
  const std::map<std::string, std::string>& phrases() const { return phrases_; }

  // Throws unless every key in `slot_keys` has a phrase.
  void CheckCovers(const std::set<std::string>& slot_keys) const;

  // Key/value config file: one `slot_key = phrase` per line, '#' comments.
  static NameMap Load(const std::string& path);
  static NameMap Parse(const std::string& contents);
  std::string Serialize() const;

 private:
  std::map<std::string, std::string> phrases_;
};

// Built-in maps for "restaurants" (restaurants-8k keys), "synthetic", and
// "dstc8" style keys. Unknown domain names throw Error(kConfig).
NameMap DefaultNameMap(std::string_view domain);

struct ContextText {
  std::string text;
  // Location of the utterance inside `text`.
  Span utterance_range;
};

struct TargetText {
  // Surface value (or "not provided") followed by " [EOS]".
  std::string text;
  // The example span when the label is non-null.
  std::optional<Span> span;
};

// "{u} [EOS] Ok, the {f(key)} is" or, with requested slots,
// "What is the {f(r1)}, ..., {f(rm)}? [EOS] {u} [EOS] Ok, the {f(key)} is".
ContextText RenderContext(const SlotExample& example, const std::string& slot_key,
                          const NameMap& names);

// Key/value baseline: "{u} [EOS] {slot_key} =".
ContextText RenderTrivialContext(const SlotExample& example, const std::string& slot_key);

// Throws Error(kValidation) for empty spans.
TargetText RenderTarget(const SlotExample& example, const SlotLabel& label);

}  // namespace gensf

#endif  // GENSF_TEMPLATING_H_
