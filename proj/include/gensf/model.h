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

#ifndef GENSF_MODEL_H_
#define GENSF_MODEL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gensf/tokenizer.h"

namespace gensf {

template <typename T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using VectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct ModelConfig {
  int layers = 2;
  int heads = 4;
  int hidden_dim = 128;
  int context_window = 128;
  int vocab_size = Vocab::kBaseSize;
  std::uint64_t seed = 0;

  // Throws Error(kConfig) on non-positive sizes or hidden_dim % heads != 0.
  void Validate() const;
  // Closed form: (V + C) d + L (12 d^2 + 13 d) + 2 d + V d + V + d + 1.
  std::size_t ParameterCount() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename T>
struct BlockParams {
  VectorT<T> ln1_gain, ln1_bias;
  MatrixT<T> qkv_weight;  // d x 3d
  VectorT<T> qkv_bias;
  MatrixT<T> attn_out_weight;  // d x d
  VectorT<T> attn_out_bias;
  VectorT<T> ln2_gain, ln2_bias;
  MatrixT<T> fc_weight;  // d x 4d
  VectorT<T> fc_bias;
  MatrixT<T> proj_weight;  // 4d x d
  VectorT<T> proj_bias;
};

// One named parameter tensor viewed as a flat array.
template <typename T>
struct TensorRef {
  std::string name;
  T* data;
  Eigen::Index size;
  // Gains and biases are excluded from weight decay.
  bool decays;
  bool copy_head;
};

template <typename T>
struct Parameters {
  MatrixT<T> token_embedding;     // V x d
  MatrixT<T> position_embedding;  // C x d
  std::vector<BlockParams<T>> blocks;
  VectorT<T> final_gain, final_bias;
  MatrixT<T> head_weight;  // V x d, the vocabulary projection W
  VectorT<T> head_bias;    // V, b
  VectorT<T> copy_weight;  // d, W_copy
  VectorT<T> copy_bias;    // 1, b_copy

  static Parameters Zeros(const ModelConfig& config);

  // Stable order; checkpoints and optimizer state rely on it.
  std::vector<TensorRef<T>> Tensors();
  std::size_t Count();
  void SetZero();
};

template <typename T>
struct BlockCache {
  MatrixT<T> input;
  MatrixT<T> ln1_hat, ln1_out;
  VectorT<T> ln1_rstd;
  MatrixT<T> qkv;
  std::vector<MatrixT<T>> probs;  // per head, T x T, zero above the diagonal
  MatrixT<T> attn;
  MatrixT<T> mid;
  MatrixT<T> ln2_hat, ln2_out;
  VectorT<T> ln2_rstd;
  MatrixT<T> fc_pre, fc_act;
};

template <typename T>
struct ForwardCache {
  std::vector<TokenId> ids;
  std::vector<BlockCache<T>> blocks;
  MatrixT<T> final_hat;
  VectorT<T> final_rstd;
  MatrixT<T> hidden;
};

// Pre-norm causal transformer decoder (GELU MLP, learned positions) with a
// vocabulary head and a scalar copy gate. Hidden states are the final
// layer-norm outputs, one row per input token.
template <typename T>
class Transformer {
 public:
  // Normal(0, 0.02) weights with residual projections scaled by
  // 1/sqrt(2 layers), Normal(0, 0.01) positions, unit gains, zero biases.
  explicit Transformer(const ModelConfig& config);
  Transformer(const ModelConfig& config, Parameters<T> params);

  const ModelConfig& config() const { return config_; }
  Parameters<T>& params() { return params_; }
  const Parameters<T>& params() const { return params_; }

  // Throws Error(kRange) when ids exceed the context window or the vocab.
  MatrixT<T> Forward(std::span<const TokenId> ids) const;
  const MatrixT<T>& Forward(std::span<const TokenId> ids, ForwardCache<T>& cache) const;

  // Accumulates dLoss/dParams into `grads` given dLoss/dHidden.
  void Backward(const ForwardCache<T>& cache, const MatrixT<T>& d_hidden,
                Parameters<T>& grads) const;

  // W h + b.
  VectorT<T> VocabLogits(const Eigen::Ref<const VectorT<T>>& hidden) const;
  // softmax(W h + b).
  VectorT<T> VocabDistribution(const Eigen::Ref<const VectorT<T>>& hidden) const;

  template <typename U>
  Transformer<U> Cast() const;

 private:
  void CheckInput(std::span<const TokenId> ids) const;

  ModelConfig config_;
  Parameters<T> params_;
};

using Model = Transformer<float>;

// Numerically stable softmax of a logit vector.
template <typename T>
VectorT<T> Softmax(const Eigen::Ref<const VectorT<T>>& logits);

// FNV-1a over the raw parameter bytes; used to assert that inference leaves
// parameters untouched.
std::uint64_t ParameterChecksum(const Model& model);

// Binary checkpoint, see docs/formats.md: magic, config, metadata, vocab,
// then the float32 little-endian parameter blob in Tensors() order.
struct Checkpoint {
  Model model;
  Vocab vocab;
  std::map<std::string, std::string> metadata;
};

void SaveCheckpoint(const std::string& path, const Model& model, const Vocab& vocab,
                    const std::map<std::string, std::string>& metadata);
std::string SerializeCheckpoint(const Model& model, const Vocab& vocab,
                                const std::map<std::string, std::string>& metadata);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace gensf

#endif  // GENSF_MODEL_H_
