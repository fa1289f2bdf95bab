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

#ifndef GENSF_POSTPROCESS_H_
#define GENSF_POSTPROCESS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gensf/corpus.h"
#include "gensf/tokenizer.h"

namespace gensf {

struct RecoveryConfig {
  // Accept the closest span when its distance is <= ratio * len(generated).
  double threshold_ratio = 0.3;
  std::size_t max_span_tokens = 10;

  void Validate() const;
};

// Unit-cost edit distance over Unicode code points.
std::size_t Levenshtein(std::string_view a, std::string_view b);

// ASCII lowercase with surrounding whitespace removed.
std::string NormalizeValue(std::string_view text);

struct CandidateSpan {
  std::string text;
  Span range;  // into the utterance
  std::size_t token_count = 0;
};

// Every token-aligned contiguous span of 1..max_span_tokens tokens, ordered
// by start token then length.
std::vector<CandidateSpan> EnumerateSpans(const std::string& utterance, const TokenSeq& tokens,
                                          std::size_t max_span_tokens);

struct RecoveredValue {
  enum class Kind { kNull, kSpan, kRaw };
  Kind kind = Kind::kNull;
  std::string text;
  Span range;  // valid for kSpan

  bool is_null() const { return kind == Kind::kNull; }
};

// Maps a generated value back onto the utterance: "not provided" -> NULL; an
// exact (normalized) span match -> that span; otherwise the closest span
// within the threshold (ties: smaller distance, shorter, leftmost); else the
// generated string unchanged.
// Closest span with no threshold; NULL kind only when there are no spans.
RecoveredValue NearestSpan(const std::string& generated, const std::string& utterance,
                           const TokenSeq& tokens, const RecoveryConfig& config);

RecoveredValue RecoverSpan(const std::string& generated, const std::string& utterance,
                           const TokenSeq& tokens, const RecoveryConfig& config);

}  // namespace gensf

#endif  // GENSF_POSTPROCESS_H_
