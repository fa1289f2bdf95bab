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

#include "gensf/decoding.h"

#include "gensf/error.h"

namespace gensf {
namespace {

std::string TrimWhitespace(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

Generation Decode(const Model& model, const Vocab& vocab, const EncodedContext& context,
                  const AllowedSet* allowed, const DecodeOptions& options) {
  Generation gen;
  std::vector<TokenId> sequence = context.ids;
  SourceMask mask = context.copy_mask;
  for (int step = 0; step < options.max_len; ++step) {
    const MatrixT<float> states = model.Forward(sequence);
    mask.resize(sequence.size(), 0);
    const auto next = NextTokenDistribution<float>(
        model, states, static_cast<Eigen::Index>(sequence.size()) - 1, sequence, mask,
        options.copy_enabled);
    const TokenId id = ArgmaxToken(next.final_dist, allowed);
    gen.step_probability.push_back(next.final_dist(id));
    if (id == Vocab::kEos) {
      gen.termination = Termination::kEos;
      break;
    }
    gen.ids.push_back(id);
    sequence.push_back(id);
  }
  gen.text = TrimWhitespace(vocab.Decode(gen.ids));
  return gen;
}

}  // namespace

EncodedContext EncodeContext(const Vocab& vocab, const ContextText& context, CopySource source) {
  const TokenSeq tokens = vocab.Encode(context.text);
  EncodedContext out;
  out.ids = tokens.ids;
  out.copy_mask.assign(tokens.size(), source == CopySource::kFullContext ? 1 : 0);
  bool first = true;
  const Span& range = context.utterance_range;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Span& s = tokens.spans[i];
    const bool inside = s.start >= range.start && s.end <= range.end && !vocab.IsSpecial(tokens.ids[i]);
    if (!inside) continue;
    if (first) {
      out.utterance_offset = i;
      first = false;
    }
    out.copy_mask[i] = 1;
    out.utterance_tokens.ids.push_back(tokens.ids[i]);
    out.utterance_tokens.spans.push_back({s.start - range.start, s.end - range.start});
  }
  return out;
}

std::vector<TokenId> TargetTokens(const Vocab& vocab, const EncodedContext& context,
                                  const std::string& utterance, const SlotLabel& label) {
  if (!label.has_value()) {
    return vocab.Encode(std::string(" ") + std::string(kNotProvided)).ids;
  }
  const Span& span = *label.span;
  const TokenSeq& u = context.utterance_tokens;
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!first && u.spans[i].start == span.start) first = i;
    if (first && u.spans[i].end == span.end) {
      return {u.ids.begin() + static_cast<std::ptrdiff_t>(*first),
              u.ids.begin() + static_cast<std::ptrdiff_t>(i) + 1};
    }
    if (first && u.spans[i].end > span.end) break;
  }
  return vocab.Encode(" " + utterance.substr(span.start, span.size())).ids;
}

std::set<TokenId> NotProvidedTokens(const Vocab& vocab) {
  std::set<TokenId> out;
  for (TokenId id : vocab.Encode(std::string(" ") + std::string(kNotProvided)).ids) out.insert(id);
  for (TokenId id : vocab.Encode(kNotProvided).ids) out.insert(id);
  return out;
}

AllowedSet AllowedTokenSet(const Vocab& vocab, const TokenSeq& utterance_tokens) {
  AllowedSet allowed;
  allowed.ids.insert(utterance_tokens.ids.begin(), utterance_tokens.ids.end());
  allowed.ids.merge(NotProvidedTokens(vocab));
  allowed.ids.insert(Vocab::kEos);
  return allowed;
}

TokenId ArgmaxToken(const VectorT<float>& dist, const AllowedSet* allowed) {
  TokenId best = -1;
  float best_p = 0;
  if (allowed != nullptr) {
    // std::set iterates in increasing id order, so '>' keeps the lowest id.
    for (TokenId id : allowed->ids) {
      if (id >= dist.size()) continue;
      if (best < 0 || dist(id) > best_p) {
        best = id;
        best_p = dist(id);
      }
    }
    if (best < 0) throw Error(ErrorKind::kRange, "allowed set has no id inside the vocab");
    return best;
  }
  for (Eigen::Index id = 0; id < dist.size(); ++id) {
    if (best < 0 || dist(id) > best_p) {
      best = static_cast<TokenId>(id);
      best_p = dist(id);
    }
  }
  return best;
}

Generation GreedyDecode(const Model& model, const Vocab& vocab, const EncodedContext& context,
                        const DecodeOptions& options) {
  return Decode(model, vocab, context, nullptr, options);
}

Generation ConstrainedDecode(const Model& model, const Vocab& vocab,
                             const EncodedContext& context, const AllowedSet& allowed,
                             const DecodeOptions& options) {
  return Decode(model, vocab, context, &allowed, options);
}

}  // namespace gensf
