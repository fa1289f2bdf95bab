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

#include "gensf/tokenizer.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "gensf/error.h"
#include "gensf/templating.h"

namespace gensf {
namespace {

constexpr std::string_view kSpecialMarkers[Vocab::kSpecialCount] = {"[EOS]", "[PAD]", "[UNK]"};
constexpr std::string_view kHeader = "gensf-bpe 1";

enum class CharClass { kSpace, kLetter, kDigit, kOther };

CharClass Classify(unsigned char c) {
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
    return CharClass::kSpace;
  }
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80) return CharClass::kLetter;
  if (c >= '0' && c <= '9') return CharClass::kDigit;
  return CharClass::kOther;
}

std::size_t SpecialAt(std::string_view text, std::size_t pos) {
  for (std::size_t k = 0; k < Vocab::kSpecialCount; ++k) {
    if (text.substr(pos, kSpecialMarkers[k].size()) == kSpecialMarkers[k]) return k + 1;
  }
  return 0;
}

std::uint64_t PairKey(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

std::vector<PreToken> PreTokenize(std::string_view text) {
  std::vector<PreToken> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (std::size_t k = SpecialAt(text, i)) {
      const std::size_t len = kSpecialMarkers[k - 1].size();
      out.push_back({{i, i + len}, true, false});
      i += len;
      continue;
    }
    const auto cls = Classify(static_cast<unsigned char>(text[i]));
    if (cls == CharClass::kSpace) {
      std::size_t j = i;
      while (j < n && Classify(static_cast<unsigned char>(text[j])) == CharClass::kSpace) ++j;
      // A final ' ' before a word attaches to that word.
      const bool attaches = j < n && text[j - 1] == ' ' && SpecialAt(text, j) == 0;
      const std::size_t ws_end = attaches ? j - 1 : j;
      if (ws_end > i) out.push_back({{i, ws_end}, false, false});
      i = ws_end;
      if (!attaches) continue;
    }
    const bool leading_space = text[i] == ' ';
    std::size_t j = leading_space ? i + 1 : i;
    const auto word_class = Classify(static_cast<unsigned char>(text[j]));
    ++j;
    while (j < n && Classify(static_cast<unsigned char>(text[j])) == word_class &&
           SpecialAt(text, j) == 0) {
      ++j;
    }
    out.push_back({{i, j}, false, leading_space});
    i = j;
  }
  return out;
}

Vocab::Vocab() : Vocab(std::vector<std::pair<TokenId, TokenId>>{}) {}

Vocab::Vocab(std::vector<std::pair<TokenId, TokenId>> merges) : merges_(std::move(merges)) {
  pieces_.reserve(kBaseSize + merges_.size());
  for (int b = 0; b < kByteCount; ++b) pieces_.emplace_back(1, static_cast<char>(b));
  for (std::string_view marker : kSpecialMarkers) pieces_.emplace_back(marker);
  for (std::size_t r = 0; r < merges_.size(); ++r) {
    const auto [a, b] = merges_[r];
    const auto next = static_cast<TokenId>(pieces_.size());
    if (a < 0 || b < 0 || a >= next || b >= next || IsSpecial(a) || IsSpecial(b)) {
      throw Error(ErrorKind::kParse, "merge " + std::to_string(r) + " references an invalid id");
    }
    pieces_.push_back(pieces_[a] + pieces_[b]);
    merge_rank_.emplace(PairKey(a, b), static_cast<int>(r));
  }
}

const std::string& Vocab::Piece(TokenId id) const {
  if (id < 0 || id >= size()) {
    throw Error(ErrorKind::kRange, "token id " + std::to_string(id) + " out of range");
  }
  return pieces_[id];
}

void Vocab::EncodePiece(std::string_view piece, std::size_t offset, bool leading_space,
                        TokenSeq& out) const {
  std::vector<TokenId> symbols(piece.size());
  std::vector<std::size_t> lengths(piece.size(), 1);
  for (std::size_t i = 0; i < piece.size(); ++i) symbols[i] = static_cast<unsigned char>(piece[i]);
  while (symbols.size() > 1) {
    int best_rank = std::numeric_limits<int>::max();
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = merge_rank_.find(PairKey(symbols[i], symbols[i + 1]));
      if (it != merge_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
        best_pos = i;
      }
    }
    if (best_rank == std::numeric_limits<int>::max()) break;
    const TokenId merged = kBaseSize + best_rank;
    const auto [a, b] = merges_[best_rank];
    // Merge every occurrence of the pair, left to right.
    std::size_t w = 0;
    for (std::size_t i = 0; i < symbols.size(); ++w) {
      if (i >= best_pos && i + 1 < symbols.size() && symbols[i] == a && symbols[i + 1] == b) {
        symbols[w] = merged;
        lengths[w] = lengths[i] + lengths[i + 1];
        i += 2;
      } else {
        symbols[w] = symbols[i];
        lengths[w] = lengths[i];
        ++i;
      }
    }
    symbols.resize(w);
    lengths.resize(w);
  }
  std::size_t pos = offset;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    std::size_t start = pos;
    if (i == 0 && leading_space) ++start;
    pos += lengths[i];
    out.ids.push_back(symbols[i]);
    out.spans.push_back({start, pos});
  }
}

TokenSeq Vocab::Encode(std::string_view text) const {
  TokenSeq out;
  for (const PreToken& pt : PreTokenize(text)) {
    if (pt.special) {
      out.ids.push_back(static_cast<TokenId>(kByteCount + SpecialAt(text, pt.range.start) - 1));
      out.spans.push_back(pt.range);
      continue;
    }
    EncodePiece(text.substr(pt.range.start, pt.range.size()), pt.range.start, pt.leading_space,
                out);
  }
  return out;
}

std::string Vocab::Decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += Piece(id);
  return out;
}

std::string Vocab::Serialize() const {
  std::ostringstream out;
  out << kHeader << "\n";
  out << "specials " << kSpecialCount;
  for (std::string_view marker : kSpecialMarkers) out << ' ' << marker;
  out << "\nmerges " << merges_.size() << "\n";
  for (const auto& [a, b] : merges_) out << a << ' ' << b << "\n";
  return out.str();
}

Vocab Vocab::Parse(const std::string& contents) {
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw Error(ErrorKind::kParse, "vocab: missing '" + std::string(kHeader) + "' header");
  }
  std::string word;
  int count = 0;
  if (!(in >> word >> count) || word != "specials" || count != kSpecialCount) {
    throw Error(ErrorKind::kParse, "vocab: bad specials line");
  }
  for (std::string_view marker : kSpecialMarkers) {
    if (!(in >> word) || word != marker) throw Error(ErrorKind::kParse, "vocab: unexpected special marker");
  }
  std::size_t merges = 0;
  if (!(in >> word >> merges) || word != "merges") {
    throw Error(ErrorKind::kParse, "vocab: bad merges line");
  }
  std::vector<std::pair<TokenId, TokenId>> list(merges);
  for (std::size_t i = 0; i < merges; ++i) {
    if (!(in >> list[i].first >> list[i].second)) {
      throw Error(ErrorKind::kParse, "vocab: truncated at merge " + std::to_string(i));
    }
  }
  return Vocab(std::move(list));
}

void Vocab::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << Serialize();
}

Vocab Vocab::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "vocab not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

Vocab TrainBpe(const std::vector<std::string>& corpus, int vocab_size) {
  if (vocab_size < Vocab::kBaseSize) {
    throw Error(ErrorKind::kConfig, "vocab size must be at least " + std::to_string(Vocab::kBaseSize));
  }
  std::map<std::string, long> counts;
  for (const std::string& text : corpus) {
    for (const PreToken& pt : PreTokenize(text)) {
      if (!pt.special) ++counts[text.substr(pt.range.start, pt.range.size())];
    }
  }
  if (counts.empty()) throw Error(ErrorKind::kValidation, "cannot train BPE on an empty corpus");

  std::vector<std::vector<TokenId>> words;
  std::vector<long> freq;
  for (const auto& [piece, count] : counts) {
    std::vector<TokenId> symbols;
    for (unsigned char c : piece) symbols.push_back(c);
    words.push_back(std::move(symbols));
    freq.push_back(count);
  }

  std::vector<std::pair<TokenId, TokenId>> merges;
  const int wanted = vocab_size - Vocab::kBaseSize;
  std::unordered_map<std::uint64_t, long> pair_counts;
  while (static_cast<int>(merges.size()) < wanted) {
    pair_counts.clear();
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto& s = words[w];
      for (std::size_t i = 0; i + 1 < s.size(); ++i) pair_counts[PairKey(s[i], s[i + 1])] += freq[w];
    }
    if (pair_counts.empty()) break;
    std::uint64_t best_key = 0;
    long best_count = 0;
    for (const auto& [key, count] : pair_counts) {
      if (count > best_count || (count == best_count && key < best_key)) {
        best_count = count;
        best_key = key;
      }
    }
    const auto a = static_cast<TokenId>(best_key >> 32);
    const auto b = static_cast<TokenId>(best_key & 0xffffffffu);
    const auto merged = static_cast<TokenId>(Vocab::kBaseSize + merges.size());
    merges.emplace_back(a, b);
    for (auto& s : words) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < s.size(); ++w) {
        if (i + 1 < s.size() && s[i] == a && s[i + 1] == b) {
          s[w] = merged;
          i += 2;
        } else {
          s[w] = s[i];
          ++i;
        }
      }
      s.resize(w);
    }
  }
  return Vocab(std::move(merges));
}

}  // namespace gensf
