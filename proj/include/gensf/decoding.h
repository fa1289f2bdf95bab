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

#ifndef GENSF_DECODING_H_
#define GENSF_DECODING_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gensf/copy.h"
#include "gensf/model.h"
#include "gensf/templating.h"
#include "gensf/tokenizer.h"

namespace gensf {

// A rendered context as model input.
struct EncodedContext {
  std::vector<TokenId> ids;
  // Copy-source positions (the utterance or the whole context).
  SourceMask copy_mask;
  // Tokens of the utterance with spans relative to the utterance string.
  TokenSeq utterance_tokens;
  // Index of the first utterance token in `ids`.
  std::size_t utterance_offset = 0;
};

EncodedContext EncodeContext(const Vocab& vocab, const ContextText& context,
                             CopySource source = CopySource::kUtterance);

// Target token ids (without EOS) for a label: the utterance's own tokens for
// a token-aligned span, otherwise the encoding of " value"; a NULL label maps
// to " not provided".
std::vector<TokenId> TargetTokens(const Vocab& vocab, const EncodedContext& context,
                                  const std::string& utterance, const SlotLabel& label);

// Token ids of the phrase "not provided" as generated after the response
// stem (with the leading space) and standalone.
std::set<TokenId> NotProvidedTokens(const Vocab& vocab);

// Utterance tokens, "not provided" tokens, and EOS.
struct AllowedSet {
  std::set<TokenId> ids;
  bool Contains(TokenId id) const { return ids.contains(id); }
};

AllowedSet AllowedTokenSet(const Vocab& vocab, const TokenSeq& utterance_tokens);

enum class Termination { kEos, kMaxLen };

struct Generation {
  std::vector<TokenId> ids;  // excludes the final EOS
  std::string text;          // decoded ids, surrounding whitespace trimmed
  std::vector<double> step_probability;  // probability of each chosen id
  Termination termination = Termination::kMaxLen;
};

struct DecodeOptions {
  bool copy_enabled = true;
  int max_len = 16;
};

// Argmax of the next-token distribution at every step; stops at EOS or
// after max_len tokens. Throws Error(kRange) when the sequence outgrows the
// context window.
Generation GreedyDecode(const Model& model, const Vocab& vocab, const EncodedContext& context,
                        const DecodeOptions& options);

// Same, but each argmax ranges over `allowed` only. The distribution is
// masked, not renormalized; ties go to the lowest id.
Generation ConstrainedDecode(const Model& model, const Vocab& vocab,
                             const EncodedContext& context, const AllowedSet& allowed,
                             const DecodeOptions& options);

// Argmax of `dist` over `allowed` (or all ids when null), lowest id on ties.
TokenId ArgmaxToken(const VectorT<float>& dist, const AllowedSet* allowed);

}  // namespace gensf

#endif  // GENSF_DECODING_H_
