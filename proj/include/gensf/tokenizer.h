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

#ifndef GENSF_TOKENIZER_H_
#define GENSF_TOKENIZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gensf/corpus.h"

namespace gensf {

using TokenId = std::int32_t;

// Tokenized text. `spans[i]` is the byte range of token i in the source,
// excluding the single leading space that a word-initial token carries, so
// the spans are disjoint, increasing, and the gaps between them hold exactly
// the source whitespace.
struct TokenSeq {
  std::vector<TokenId> ids;
  std::vector<Span> spans;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

// Byte-level BPE vocabulary: ids 0..255 are raw bytes, followed by the
// special tokens, followed by one id per merge in merge order.
class Vocab {
 public:
  static constexpr int kByteCount = 256;
  static constexpr TokenId kEos = 256;
  static constexpr TokenId kPad = 257;
  static constexpr TokenId kUnk = 258;
  static constexpr int kSpecialCount = 3;
  static constexpr int kBaseSize = kByteCount + kSpecialCount;

  // Byte-level vocabulary with no merges.
  Vocab();
  explicit Vocab(std::vector<std::pair<TokenId, TokenId>> merges);

  int size() const { return static_cast<int>(pieces_.size()); }
  const std::vector<std::pair<TokenId, TokenId>>& merges() const { return merges_; }
  // Raw bytes of a non-special token, or the marker text of a special.
  const std::string& Piece(TokenId id) const;
  bool IsSpecial(TokenId id) const { return id >= kByteCount && id < kBaseSize; }

  TokenSeq Encode(std::string_view text) const;
  // Throws Error(kRange) for ids outside [0, size()).
  std::string Decode(std::span<const TokenId> ids) const;

  // Text format: header line, specials line, merge count, one "a b" id pair
  // per line.
  std::string Serialize() const;
  static Vocab Parse(const std::string& contents);
  void Save(const std::string& path) const;
  static Vocab Load(const std::string& path);

  bool operator==(const Vocab& other) const { return merges_ == other.merges_; }

 private:
  void EncodePiece(std::string_view piece, std::size_t offset, bool leading_space,
                   TokenSeq& out) const;

  std::vector<std::pair<TokenId, TokenId>> merges_;
  std::vector<std::string> pieces_;
  std::unordered_map<std::uint64_t, int> merge_rank_;
};

// Pre-tokenization: splits text into special markers, words (an optional
// single leading space plus a run of letters, digits, or punctuation), and
// whitespace runs. Returns byte ranges.
struct PreToken {
  Span range;
  bool special = false;
  bool leading_space = false;
};
std::vector<PreToken> PreTokenize(std::string_view text);

// Learns `vocab_size - Vocab::kBaseSize` merges (fewer if the corpus runs out
// of pairs). Merges are picked by highest pair count, ties by smallest ids.
Vocab TrainBpe(const std::vector<std::string>& corpus, int vocab_size);

}  // namespace gensf

#endif  // GENSF_TOKENIZER_H_
