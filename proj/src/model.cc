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

#include "gensf/model.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gensf/error.h"
#include "gensf/random.h"

namespace gensf {
namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kInitStd = 0.02;
constexpr double kPositionInitStd = 0.01;

template <typename T>
void LayerNormForward(const MatrixT<T>& x, const VectorT<T>& gain, const VectorT<T>& bias,
                      MatrixT<T>& hat, VectorT<T>& rstd, MatrixT<T>& out) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index cols = x.cols();
  hat.resize(rows, cols);
  rstd.resize(rows);
  out.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const T mean = x.row(r).mean();
    const T var = (x.row(r).array() - mean).square().mean();
    const T inv = T(1) / std::sqrt(var + T(kLayerNormEps));
    rstd(r) = inv;
    hat.row(r) = (x.row(r).array() - mean) * inv;
    out.row(r) = hat.row(r).array() * gain.transpose().array() + bias.transpose().array();
  }
}

// Returns dLoss/dx; accumulates gain/bias gradients.
template <typename T>
MatrixT<T> LayerNormBackward(const MatrixT<T>& d_out, const MatrixT<T>& hat,
                             const VectorT<T>& rstd, const VectorT<T>& gain,
                             VectorT<T>& d_gain, VectorT<T>& d_bias) {
  d_gain += (d_out.array() * hat.array()).colwise().sum().transpose().matrix();
  d_bias += d_out.colwise().sum().transpose();
  MatrixT<T> d_hat = d_out.array().rowwise() * gain.transpose().array();
  MatrixT<T> dx(d_out.rows(), d_out.cols());
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
    const T mean_d = d_hat.row(r).mean();
    const T mean_dh = (d_hat.row(r).array() * hat.row(r).array()).mean();
    dx.row(r) = rstd(r) * (d_hat.row(r).array() - mean_d - hat.row(r).array() * mean_dh);
  }
  return dx;
}

template <typename T>
constexpr T kGeluC = T(0.7978845608028654);  // sqrt(2 / pi)

template <typename T>
T Gelu(T x) {
  return T(0.5) * x * (T(1) + std::tanh(kGeluC<T> * (x + T(0.044715) * x * x * x)));
}

template <typename T>
T GeluGrad(T x) {
  const T t = std::tanh(kGeluC<T> * (x + T(0.044715) * x * x * x));
  return T(0.5) * (T(1) + t) +
         T(0.5) * x * (T(1) - t * t) * kGeluC<T> * (T(1) + T(3 * 0.044715) * x * x);
}

template <typename T>
void FillNormal(NormalSampler& rng, double std, MatrixT<T>& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(std * rng.Next());
}

}  // namespace

void ModelConfig::Validate() const {
  if (layers < 1 || heads < 1 || hidden_dim < 1 || context_window < 1 ||
      vocab_size < 1) {
    throw Error(ErrorKind::kConfig, "model sizes must be positive");
  }
  if (hidden_dim % heads != 0) {
    throw Error(ErrorKind::kConfig, "hidden_dim " + std::to_string(hidden_dim) +
                                        " is not divisible by heads " + std::to_string(heads));
  }
}

std::size_t ModelConfig::ParameterCount() const {
  const std::size_t d = hidden_dim;
  const std::size_t v = vocab_size;
  const std::size_t c = context_window;
  return (v + c) * d + layers * (12 * d * d + 13 * d) + 2 * d + v * d + v + d + 1;
}

template <typename T>
Parameters<T> Parameters<T>::Zeros(const ModelConfig& config) {
  const Eigen::Index d = config.hidden_dim;
  const Eigen::Index v = config.vocab_size;
  Parameters p;
  p.token_embedding = MatrixT<T>::Zero(v, d);
  p.position_embedding = MatrixT<T>::Zero(config.context_window, d);
  p.blocks.resize(config.layers);
  for (BlockParams<T>& b : p.blocks) {
    b.ln1_gain = VectorT<T>::Zero(d);
    b.ln1_bias = VectorT<T>::Zero(d);
    b.qkv_weight = MatrixT<T>::Zero(d, 3 * d);
    b.qkv_bias = VectorT<T>::Zero(3 * d);
    b.attn_out_weight = MatrixT<T>::Zero(d, d);
    b.attn_out_bias = VectorT<T>::Zero(d);
    b.ln2_gain = VectorT<T>::Zero(d);
    b.ln2_bias = VectorT<T>::Zero(d);
    b.fc_weight = MatrixT<T>::Zero(d, 4 * d);
    b.fc_bias = VectorT<T>::Zero(4 * d);
    b.proj_weight = MatrixT<T>::Zero(4 * d, d);
    b.proj_bias = VectorT<T>::Zero(d);
  }
  p.final_gain = VectorT<T>::Zero(d);
  p.final_bias = VectorT<T>::Zero(d);
  p.head_weight = MatrixT<T>::Zero(v, d);
  p.head_bias = VectorT<T>::Zero(v);
  p.copy_weight = VectorT<T>::Zero(d);
  p.copy_bias = VectorT<T>::Zero(1);
  return p;
}

template <typename T>
std::vector<TensorRef<T>> Parameters<T>::Tensors() {
  std::vector<TensorRef<T>> out;
  auto add = [&out](std::string name, auto& m, bool decays, bool copy = false) {
    out.push_back({std::move(name), m.data(), m.size(), decays, copy});
  };
  add("token_embedding", token_embedding, true);
  add("position_embedding", position_embedding, true);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    BlockParams<T>& b = blocks[i];
    const std::string p = "block" + std::to_string(i) + ".";
    add(p + "ln1_gain", b.ln1_gain, false);
    add(p + "ln1_bias", b.ln1_bias, false);
    add(p + "qkv_weight", b.qkv_weight, true);
    add(p + "qkv_bias", b.qkv_bias, false);
    add(p + "attn_out_weight", b.attn_out_weight, true);
    add(p + "attn_out_bias", b.attn_out_bias, false);
    add(p + "ln2_gain", b.ln2_gain, false);
    add(p + "ln2_bias", b.ln2_bias, false);
    add(p + "fc_weight", b.fc_weight, true);
    add(p + "fc_bias", b.fc_bias, false);
    add(p + "proj_weight", b.proj_weight, true);
    add(p + "proj_bias", b.proj_bias, false);
  }
  add("final_gain", final_gain, false);
  add("final_bias", final_bias, false);
  add("head_weight", head_weight, true);
  add("head_bias", head_bias, false);
  add("copy_weight", copy_weight, true, true);
  add("copy_bias", copy_bias, false, true);
  return out;
}

template <typename T>
std::size_t Parameters<T>::Count() {
  std::size_t n = 0;
  for (const auto& t : Tensors()) n += static_cast<std::size_t>(t.size);
  return n;
}

template <typename T>
void Parameters<T>::SetZero() {
  for (auto& t : Tensors()) std::fill(t.data, t.data + t.size, T(0));
}

template <typename T>
Transformer<T>::Transformer(const ModelConfig& config) : config_(config) {
  config_.Validate();
  // Initialize in double so float and double models with the same seed agree.
  Parameters<double> init = Parameters<double>::Zeros(config_);
  NormalSampler rng(DeriveSeed(config_.seed, "init"));
  const double residual_std = kInitStd / std::sqrt(2.0 * config_.layers);
  FillNormal(rng, kInitStd, init.token_embedding);
  FillNormal(rng, kPositionInitStd, init.position_embedding);
  for (BlockParams<double>& b : init.blocks) {
    b.ln1_gain.setOnes();
    b.ln2_gain.setOnes();
    FillNormal(rng, kInitStd, b.qkv_weight);
    FillNormal(rng, residual_std, b.attn_out_weight);
    FillNormal(rng, kInitStd, b.fc_weight);
    FillNormal(rng, residual_std, b.proj_weight);
  }
  init.final_gain.setOnes();
  FillNormal(rng, kInitStd, init.head_weight);
  for (Eigen::Index i = 0; i < init.copy_weight.size(); ++i) {
    init.copy_weight(i) = kInitStd * rng.Next();
  }
  params_ = Parameters<T>::Zeros(config_);
  auto src = init.Tensors();
  auto dst = params_.Tensors();
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (Eigen::Index j = 0; j < src[i].size; ++j) dst[i].data[j] = static_cast<T>(src[i].data[j]);
  }
}

template <typename T>
Transformer<T>::Transformer(const ModelConfig& config, Parameters<T> params)
    : config_(config), params_(std::move(params)) {
  config_.Validate();
  if (params_.Count() != config_.ParameterCount()) {
    throw Error(ErrorKind::kConfig, "parameter shapes do not match the config");
  }
}

template <typename T>
template <typename U>
Transformer<U> Transformer<T>::Cast() const {
  Parameters<U> out = Parameters<U>::Zeros(config_);
  auto src = const_cast<Parameters<T>&>(params_).Tensors();
  auto dst = out.Tensors();
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (Eigen::Index j = 0; j < src[i].size; ++j) dst[i].data[j] = static_cast<U>(src[i].data[j]);
  }
  return Transformer<U>(config_, std::move(out));
}

template <typename T>
void Transformer<T>::CheckInput(std::span<const TokenId> ids) const {
  if (ids.empty()) throw Error(ErrorKind::kRange, "empty input sequence");
  if (static_cast<int>(ids.size()) > config_.context_window) {
    throw Error(ErrorKind::kRange, "input of " + std::to_string(ids.size()) +
                                       " tokens exceeds the context window of " +
                                       std::to_string(config_.context_window));
  }
  for (TokenId id : ids) {
    if (id < 0 || id >= config_.vocab_size) {
      throw Error(ErrorKind::kRange, "token id " + std::to_string(id) + " outside the model vocab");
    }
  }
}

template <typename T>
MatrixT<T> Transformer<T>::Forward(std::span<const TokenId> ids) const {
  ForwardCache<T> cache;
  return Forward(ids, cache);
}

template <typename T>
const MatrixT<T>& Transformer<T>::Forward(std::span<const TokenId> ids,
                                          ForwardCache<T>& cache) const {
  CheckInput(ids);
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index d = config_.hidden_dim;
  const int heads = config_.heads;
  const Eigen::Index dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));

  cache.ids.assign(ids.begin(), ids.end());
  cache.blocks.resize(params_.blocks.size());
  MatrixT<T> x(n, d);
  for (Eigen::Index t = 0; t < n; ++t) {
    x.row(t) = params_.token_embedding.row(ids[t]) + params_.position_embedding.row(t);
  }
  for (std::size_t l = 0; l < params_.blocks.size(); ++l) {
    const BlockParams<T>& p = params_.blocks[l];
    BlockCache<T>& c = cache.blocks[l];
    c.input = x;
    LayerNormForward(c.input, p.ln1_gain, p.ln1_bias, c.ln1_hat, c.ln1_rstd, c.ln1_out);
    c.qkv.noalias() = c.ln1_out * p.qkv_weight;
    c.qkv.rowwise() += p.qkv_bias.transpose();
    c.attn.resize(n, d);
    c.probs.resize(heads);
    for (int h = 0; h < heads; ++h) {
      const auto q = c.qkv.middleCols(h * dh, dh);
      const auto k = c.qkv.middleCols(d + h * dh, dh);
      const auto v = c.qkv.middleCols(2 * d + h * dh, dh);
      MatrixT<T>& probs = c.probs[h];
      probs.noalias() = (q * k.transpose()) * scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        auto row = probs.row(i);
        const T max = row.head(i + 1).maxCoeff();
        row.head(i + 1) = (row.head(i + 1).array() - max).exp();
        row.head(i + 1) /= row.head(i + 1).sum();
        row.tail(n - i - 1).setZero();
      }
      c.attn.middleCols(h * dh, dh).noalias() = probs * v;
    }
    c.mid = c.input;
    c.mid.noalias() += c.attn * p.attn_out_weight;
    c.mid.rowwise() += p.attn_out_bias.transpose();
    LayerNormForward(c.mid, p.ln2_gain, p.ln2_bias, c.ln2_hat, c.ln2_rstd, c.ln2_out);
    c.fc_pre.noalias() = c.ln2_out * p.fc_weight;
    c.fc_pre.rowwise() += p.fc_bias.transpose();
    c.fc_act = c.fc_pre.unaryExpr([](T v) { return Gelu(v); });
    x = c.mid;
    x.noalias() += c.fc_act * p.proj_weight;
    x.rowwise() += p.proj_bias.transpose();
  }
  LayerNormForward(x, params_.final_gain, params_.final_bias, cache.final_hat,
                   cache.final_rstd, cache.hidden);
  return cache.hidden;
}

template <typename T>
void Transformer<T>::Backward(const ForwardCache<T>& cache, const MatrixT<T>& d_hidden,
                              Parameters<T>& grads) const {
  const Eigen::Index n = static_cast<Eigen::Index>(cache.ids.size());
  const Eigen::Index d = config_.hidden_dim;
  const int heads = config_.heads;
  const Eigen::Index dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));

  MatrixT<T> dx = LayerNormBackward(d_hidden, cache.final_hat, cache.final_rstd,
                                    params_.final_gain, grads.final_gain, grads.final_bias);
  MatrixT<T> d_qkv(n, 3 * d);
  for (std::size_t l = params_.blocks.size(); l-- > 0;) {
    const BlockParams<T>& p = params_.blocks[l];
    const BlockCache<T>& c = cache.blocks[l];
    BlockParams<T>& g = grads.blocks[l];

    // MLP branch; dx is the gradient w.r.t. the block output.
    g.proj_bias += dx.colwise().sum().transpose();
    g.proj_weight.noalias() += c.fc_act.transpose() * dx;
    MatrixT<T> d_fc = dx * p.proj_weight.transpose();
    d_fc.array() *= c.fc_pre.unaryExpr([](T v) { return GeluGrad(v); }).array();
    g.fc_bias += d_fc.colwise().sum().transpose();
    g.fc_weight.noalias() += c.ln2_out.transpose() * d_fc;
    MatrixT<T> d_ln2 = d_fc * p.fc_weight.transpose();
    MatrixT<T> d_mid = dx + LayerNormBackward(d_ln2, c.ln2_hat, c.ln2_rstd, p.ln2_gain,
                                              g.ln2_gain, g.ln2_bias);

    // Attention branch.
    g.attn_out_bias += d_mid.colwise().sum().transpose();
    g.attn_out_weight.noalias() += c.attn.transpose() * d_mid;
    MatrixT<T> d_attn = d_mid * p.attn_out_weight.transpose();
    for (int h = 0; h < heads; ++h) {
      const auto q = c.qkv.middleCols(h * dh, dh);
      const auto k = c.qkv.middleCols(d + h * dh, dh);
      const auto v = c.qkv.middleCols(2 * d + h * dh, dh);
      const MatrixT<T>& probs = c.probs[h];
      const auto d_out = d_attn.middleCols(h * dh, dh);
      MatrixT<T> d_probs = d_out * v.transpose();
      d_qkv.middleCols(2 * d + h * dh, dh).noalias() = probs.transpose() * d_out;
      // Softmax backward; masked entries have zero probability.
      const VectorT<T> row_dot = (d_probs.array() * probs.array()).rowwise().sum();
      MatrixT<T> d_scores = probs.array() * (d_probs.colwise() - row_dot).array();
      d_scores *= scale;
      d_qkv.middleCols(h * dh, dh).noalias() = d_scores * k;
      d_qkv.middleCols(d + h * dh, dh).noalias() = d_scores.transpose() * q;
    }
    g.qkv_bias += d_qkv.colwise().sum().transpose();
    g.qkv_weight.noalias() += c.ln1_out.transpose() * d_qkv;
    MatrixT<T> d_ln1 = d_qkv * p.qkv_weight.transpose();
    dx = d_mid + LayerNormBackward(d_ln1, c.ln1_hat, c.ln1_rstd, p.ln1_gain, g.ln1_gain,
                                   g.ln1_bias);
  }
  for (Eigen::Index t = 0; t < n; ++t) {
    grads.token_embedding.row(cache.ids[t]) += dx.row(t);
    grads.position_embedding.row(t) += dx.row(t);
  }
}

template <typename T>
VectorT<T> Transformer<T>::VocabLogits(const Eigen::Ref<const VectorT<T>>& hidden) const {
  return params_.head_weight * hidden + params_.head_bias;
}

template <typename T>
VectorT<T> Transformer<T>::VocabDistribution(const Eigen::Ref<const VectorT<T>>& hidden) const {
  return Softmax<T>(VocabLogits(hidden));
}

template <typename T>
VectorT<T> Softmax(const Eigen::Ref<const VectorT<T>>& logits) {
  const T max = logits.maxCoeff();
  VectorT<T> out = (logits.array() - max).exp();
  out /= out.sum();
  return out;
}

template class Transformer<float>;
template class Transformer<double>;
template struct Parameters<float>;
template struct Parameters<double>;
template Transformer<double> Transformer<float>::Cast<double>() const;
template Transformer<float> Transformer<double>::Cast<float>() const;
template Transformer<float> Transformer<float>::Cast<float>() const;
template Transformer<double> Transformer<double>::Cast<double>() const;
template VectorT<float> Softmax<float>(const Eigen::Ref<const VectorT<float>>&);
template VectorT<double> Softmax<double>(const Eigen::Ref<const VectorT<double>>&);

std::uint64_t ParameterChecksum(const Model& model) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : const_cast<Parameters<float>&>(model.params()).Tensors()) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(t.data);
    for (std::size_t i = 0; i < static_cast<std::size_t>(t.size) * sizeof(float); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Checkpoints.

namespace {

constexpr char kMagic[8] = {'G', 'S', 'F', 'C', 'K', 'P', 'T', '1'};

template <typename U>
void PutLe(std::string& out, U value) {
  static_assert(std::is_trivially_copyable_v<U>);
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(U));
}

void PutString(std::string& out, const std::string& s) {
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  template <typename U>
  U Get() {
    Need(sizeof(U));
    unsigned char bytes[sizeof(U)];
    std::memcpy(bytes, data_.data() + pos_, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
    pos_ += sizeof(U);
    U value;
    std::memcpy(&value, bytes, sizeof(U));
    return value;
  }

  std::string GetString() {
    const auto size = Get<std::uint32_t>();
    Need(size);
    std::string s = data_.substr(pos_, size);
    pos_ += size;
    return s;
  }

  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw Error(ErrorKind::kParse, "checkpoint is truncated");
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const Model& model, const Vocab& vocab,
                                const std::map<std::string, std::string>& metadata) {
  std::string out(kMagic, sizeof(kMagic));
  const ModelConfig& c = model.config();
  PutLe<std::int32_t>(out, c.layers);
  PutLe<std::int32_t>(out, c.heads);
  PutLe<std::int32_t>(out, c.hidden_dim);
  PutLe<std::int32_t>(out, c.context_window);
  PutLe<std::int32_t>(out, c.vocab_size);
  PutLe<std::uint64_t>(out, c.seed);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(metadata.size()));
  for (const auto& [key, value] : metadata) {
    PutString(out, key);
    PutString(out, value);
  }
  PutString(out, vocab.Serialize());
  PutLe<std::uint64_t>(out, c.ParameterCount());
  for (const auto& t : const_cast<Parameters<float>&>(model.params()).Tensors()) {
    for (Eigen::Index i = 0; i < t.size; ++i) PutLe<float>(out, t.data[i]);
  }
  return out;
}

void SaveCheckpoint(const std::string& path, const Model& model, const Vocab& vocab,
                    const std::map<std::string, std::string>& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write checkpoint " + path);
  const std::string bytes = SerializeCheckpoint(model, vocab, metadata);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing checkpoint " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "checkpoint not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();
  if (data.size() < sizeof(kMagic) || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kParse, path + ": not a checkpoint (bad magic)");
  }
  const std::string body = data.substr(sizeof(kMagic));
  Reader r(body);
  ModelConfig c;
  c.layers = r.Get<std::int32_t>();
  c.heads = r.Get<std::int32_t>();
  c.hidden_dim = r.Get<std::int32_t>();
  c.context_window = r.Get<std::int32_t>();
  c.vocab_size = r.Get<std::int32_t>();
  c.seed = r.Get<std::uint64_t>();
  c.Validate();
  std::map<std::string, std::string> metadata;
  const auto entries = r.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < entries; ++i) {
    std::string key = r.GetString();
    metadata[key] = r.GetString();
  }
  Vocab vocab = Vocab::Parse(r.GetString());
  if (vocab.size() != c.vocab_size) {
    throw Error(ErrorKind::kParse, path + ": vocab size does not match model config");
  }
  const auto count = r.Get<std::uint64_t>();
  if (count != c.ParameterCount()) {
    throw Error(ErrorKind::kParse, path + ": parameter count does not match config");
  }
  Parameters<float> params = Parameters<float>::Zeros(c);
  for (auto& t : params.Tensors()) {
    for (Eigen::Index i = 0; i < t.size; ++i) t.data[i] = r.Get<float>();
  }
  if (!r.AtEnd()) throw Error(ErrorKind::kParse, path + ": trailing bytes after parameters");
  return Checkpoint{Model(c, std::move(params)), std::move(vocab), std::move(metadata)};
}

}  // namespace gensf
