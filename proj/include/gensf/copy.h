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

#ifndef GENSF_COPY_H_
#define GENSF_COPY_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "gensf/error.h"
#include "gensf/model.h"

namespace gensf {

// One flag per input position; non-zero marks a position the copy head may
// attend to.
using SourceMask = std::vector<std::uint8_t>;

enum class CopySource { kUtterance, kFullContext };

// softmax(h_q . h_i) over the masked positions i; unmasked positions get 0.
// The score is the raw dot product with no 1/sqrt(d) factor.
template <typename T>
VectorT<T> CopyAttention(const Eigen::Ref<const VectorT<T>>& query, const MatrixT<T>& states,
                         std::span<const std::uint8_t> mask) {
  const Eigen::Index n = states.rows();
  VectorT<T> alpha = VectorT<T>::Zero(n);
  T max = -std::numeric_limits<T>::infinity();
  bool any = false;
  for (Eigen::Index i = 0; i < n && i < static_cast<Eigen::Index>(mask.size()); ++i) {
    if (!mask[i]) continue;
    alpha(i) = states.row(i).dot(query.transpose());
    max = std::max(max, alpha(i));
    any = true;
  }
  if (!any) throw Error(ErrorKind::kRange, "copy source mask selects no positions");
  T sum = 0;
  for (Eigen::Index i = 0; i < n && i < static_cast<Eigen::Index>(mask.size()); ++i) {
    if (!mask[i]) continue;
    alpha(i) = std::exp(alpha(i) - max);
    sum += alpha(i);
  }
  alpha /= sum;
  return alpha;
}

// P_copy(w) = sum of alpha_i over positions whose token is w.
template <typename T>
VectorT<T> CopyDistribution(const Eigen::Ref<const VectorT<T>>& alpha,
                            std::span<const TokenId> tokens, int vocab_size) {
  VectorT<T> p = VectorT<T>::Zero(vocab_size);
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha(i) != T(0)) p(tokens[i]) += alpha(i);
  }
  return p;
}

// Logistic function kept strictly inside (0, 1) at the working precision.
template <typename T>
T Sigmoid(T z) {
  const T s = z >= 0 ? T(1) / (T(1) + std::exp(-z)) : std::exp(z) / (T(1) + std::exp(z));
  return std::clamp(s, std::numeric_limits<T>::denorm_min(),
                    std::nextafter(T(1), T(0)));
}

// p_copy = sigmoid(W_copy . h + b_copy).
template <typename T>
T CopyGate(const Transformer<T>& model,
           const std::type_identity_t<Eigen::Ref<const VectorT<T>>>& hidden) {
  return Sigmoid<T>(model.params().copy_weight.dot(hidden) + model.params().copy_bias(0));
}

// (1 - p_copy) P_vocab + p_copy P_copy.
template <typename T>
VectorT<T> MixDistributions(const Eigen::Ref<const VectorT<T>>& p_vocab,
                            const Eigen::Ref<const VectorT<T>>& p_copy_dist, T p_copy) {
  return (T(1) - p_copy) * p_vocab + p_copy * p_copy_dist;
}

template <typename T>
struct CopyOutput {
  VectorT<T> alpha;
  T p_copy = 0;
  VectorT<T> copy_dist;
  VectorT<T> vocab_dist;
  VectorT<T> final_dist;
};

// Next-token distribution at `position` given the hidden states of `tokens`.
// With the copy head disabled the result is P_vocab and the copy fields are
// left empty.
template <typename T>
CopyOutput<T> NextTokenDistribution(const Transformer<T>& model, const MatrixT<T>& states,
                                    Eigen::Index position, std::span<const TokenId> tokens,
                                    std::span<const std::uint8_t> mask, bool copy_enabled) {
  CopyOutput<T> out;
  const VectorT<T> h = states.row(position).transpose();
  out.vocab_dist = model.VocabDistribution(h);
  if (!copy_enabled) {
    out.final_dist = out.vocab_dist;
    return out;
  }
  out.alpha = CopyAttention<T>(h, states, mask);
  out.copy_dist = CopyDistribution<T>(out.alpha, tokens, model.config().vocab_size);
  out.p_copy = CopyGate(model, h);
  out.final_dist = MixDistributions<T>(out.vocab_dist, out.copy_dist, out.p_copy);
  return out;
}

}  // namespace gensf

#endif  // GENSF_COPY_H_
