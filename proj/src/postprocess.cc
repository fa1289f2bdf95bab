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

#include "gensf/postprocess.h"

#include <algorithm>
#include <cctype>
#include <limits>

#include "gensf/error.h"
#include "gensf/templating.h"

namespace gensf {
namespace {

std::u32string CodePoints(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = c;
    if (c >= 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else if (c >= 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if (c >= 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    }
    ++i;
    for (int k = 0; k < extra && i < s.size(); ++k, ++i) {
      cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
    }
    out.push_back(cp);
  }
  return out;
}

// Trims whitespace off a span of the utterance.
Span TrimRange(const std::string& utterance, Span range) {
  while (range.start < range.end && std::isspace(static_cast<unsigned char>(utterance[range.start]))) {
    ++range.start;
  }
  while (range.end > range.start && std::isspace(static_cast<unsigned char>(utterance[range.end - 1]))) {
    --range.end;
  }
  return range;
}

RecoveredValue FromSpan(const std::string& utterance, const CandidateSpan& span) {
  RecoveredValue v;
  v.kind = RecoveredValue::Kind::kSpan;
  v.range = TrimRange(utterance, span.range);
  v.text = utterance.substr(v.range.start, v.range.size());
  return v;
}

// Closest non-empty candidate: smaller distance, then fewer tokens, then
// leftmost.
const CandidateSpan* Nearest(const std::vector<CandidateSpan>& spans,
                             const std::vector<std::string>& normalized, const std::string& norm,
                             std::size_t* distance) {
  const CandidateSpan* best = nullptr;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < spans.size(); ++k) {
    if (normalized[k].empty()) continue;
    const std::size_t d = Levenshtein(norm, normalized[k]);
    const bool better =
        d < best_d || (d == best_d && (spans[k].token_count < best->token_count ||
                                       (spans[k].token_count == best->token_count &&
                                        spans[k].range.start < best->range.start)));
    if (better) {
      best = &spans[k];
      best_d = d;
    }
  }
  *distance = best_d;
  return best;
}

}  // namespace

void RecoveryConfig::Validate() const {
  if (!(threshold_ratio >= 0.0 && threshold_ratio <= 1.0)) {
    throw Error(ErrorKind::kConfig, "recovery threshold ratio must be in [0, 1]");
  }
  if (max_span_tokens < 1) throw Error(ErrorKind::kConfig, "max_span_tokens must be >= 1");
}

std::size_t Levenshtein(std::string_view a_bytes, std::string_view b_bytes) {
  const std::u32string a = CodePoints(a_bytes);
  const std::u32string b = CodePoints(b_bytes);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string NormalizeValue(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(" \t\r\n");
  std::string out(text.substr(begin, end - begin + 1));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<CandidateSpan> EnumerateSpans(const std::string& utterance, const TokenSeq& tokens,
                                          std::size_t max_span_tokens) {
  std::vector<CandidateSpan> out;
  const std::size_t n = tokens.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t len = 1; len <= max_span_tokens && i + len <= n; ++len) {
      const Span range{tokens.spans[i].start, tokens.spans[i + len - 1].end};
      out.push_back({utterance.substr(range.start, range.size()), range, len});
    }
  }
  return out;
}

RecoveredValue NearestSpan(const std::string& generated, const std::string& utterance,
                           const TokenSeq& tokens, const RecoveryConfig& config) {
  config.Validate();
  const std::string norm = NormalizeValue(generated);
  const std::vector<CandidateSpan> spans = EnumerateSpans(utterance, tokens, config.max_span_tokens);
  std::vector<std::string> normalized;
  normalized.reserve(spans.size());
  for (const CandidateSpan& s : spans) normalized.push_back(NormalizeValue(s.text));
  std::size_t d = 0;
  const CandidateSpan* best = Nearest(spans, normalized, norm, &d);
  return best != nullptr ? FromSpan(utterance, *best) : RecoveredValue{};
}

RecoveredValue RecoverSpan(const std::string& generated, const std::string& utterance,
                           const TokenSeq& tokens, const RecoveryConfig& config) {
  config.Validate();
  const std::string norm = NormalizeValue(generated);
  if (norm == kNotProvided) return {};

  const std::vector<CandidateSpan> spans = EnumerateSpans(utterance, tokens, config.max_span_tokens);
  std::vector<std::string> normalized;
  normalized.reserve(spans.size());
  for (const CandidateSpan& s : spans) normalized.push_back(NormalizeValue(s.text));

  // Exact match: shortest, then leftmost.
  const CandidateSpan* exact = nullptr;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    if (normalized[k] != norm) continue;
    if (exact == nullptr || spans[k].token_count < exact->token_count) exact = &spans[k];
  }
  if (exact != nullptr) return FromSpan(utterance, *exact);

  std::size_t best_d = 0;
  const CandidateSpan* best = Nearest(spans, normalized, norm, &best_d);
  const double limit = config.threshold_ratio * static_cast<double>(CodePoints(norm).size());
  if (best != nullptr && static_cast<double>(best_d) <= limit) return FromSpan(utterance, *best);

  RecoveredValue raw;
  raw.kind = RecoveredValue::Kind::kRaw;
  raw.text = generated;
  return raw;
}

}  // namespace gensf
