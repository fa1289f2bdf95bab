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

#include "gensf/training.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gensf/copy.h"
#include "gensf/error.h"
#include "gensf/random.h"

namespace gensf {

std::vector<TrainingPair> BuildTrainingPairs(const Dataset& dataset, const NameMap& names,
                                             TemplateStyle style, double negative_keep,
                                             std::uint64_t seed) {
  if (style == TemplateStyle::kNatural) names.CheckCovers(dataset.slot_keys);
  Rng rng(DeriveSeed(seed, "negatives"));
  std::vector<TrainingPair> pairs;
  pairs.reserve(dataset.examples.size() * dataset.slot_keys.size());
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    const SlotExample& ex = dataset.examples[i];
    for (const std::string& key : dataset.slot_keys) {
      auto it = ex.labels.find(key);
      const SlotLabel label = it == ex.labels.end() ? SlotLabel{} : it->second;
      if (!label.has_value() && negative_keep < 1.0) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u >= negative_keep) continue;
      }
      TrainingPair pair;
      pair.example_index = i;
      pair.slot_key = key;
      pair.context = style == TemplateStyle::kNatural ? RenderContext(ex, key, names)
                                                      : RenderTrivialContext(ex, key);
      pair.target = RenderTarget(ex, label);
      pair.label = label;
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

EncodedPair EncodePair(const Vocab& vocab, const TrainingPair& pair, const std::string& utterance,
                       CopySource source) {
  const EncodedContext ctx = EncodeContext(vocab, pair.context, source);
  std::vector<TokenId> target = TargetTokens(vocab, ctx, utterance, pair.label);
  target.push_back(Vocab::kEos);
  EncodedPair out;
  out.context_size = ctx.ids.size();
  out.inputs = ctx.ids;
  out.inputs.insert(out.inputs.end(), target.begin(), target.end() - 1);
  out.labels.assign(out.inputs.begin() + 1, out.inputs.end());
  out.labels.push_back(target.back());
  out.copy_mask = ctx.copy_mask;
  out.copy_mask.resize(out.inputs.size(), 0);
  return out;
}

template <typename T>
LossResult LossAndGradient(const Transformer<T>& model, const EncodedPair& pair,
                           bool copy_enabled, T weight, Parameters<T>& grads,
                           ForwardCache<T>* cache) {
  ForwardCache<T> local;
  ForwardCache<T>& c = cache ? *cache : local;
  const MatrixT<T>& states = model.Forward(pair.inputs, c);
  const Parameters<T>& p = model.params();
  const Eigen::Index n = states.rows();
  MatrixT<T> d_states = MatrixT<T>::Zero(n, states.cols());
  LossResult result;
  for (Eigen::Index pos = static_cast<Eigen::Index>(pair.context_size) - 1; pos < n; ++pos) {
    const TokenId y = pair.labels[pos];
    const VectorT<T> h = states.row(pos).transpose();
    const VectorT<T> p_vocab = model.VocabDistribution(h);
    VectorT<T> d_logits;
    if (!copy_enabled) {
      const T nll = -std::log(p_vocab(y));
      if (!std::isfinite(nll)) throw Error(ErrorKind::kDivergence, "non-finite loss");
      result.nll_sum += static_cast<double>(nll);
      d_logits = p_vocab * weight;
      d_logits(y) -= weight;
    } else {
      const VectorT<T> alpha = CopyAttention<T>(h, states, pair.copy_mask);
      T p_copy_y = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (pair.inputs[i] == y) p_copy_y += alpha(i);
      }
      const T gate = CopyGate(model, h);
      const T p_final = (T(1) - gate) * p_vocab(y) + gate * p_copy_y;
      const T nll = -std::log(p_final);
      if (!std::isfinite(nll)) throw Error(ErrorKind::kDivergence, "non-finite loss");
      result.nll_sum += static_cast<double>(nll);
      const T d_final = -weight / p_final;
      // Vocabulary branch through the softmax.
      d_logits = p_vocab * (-d_final * (T(1) - gate) * p_vocab(y));
      d_logits(y) += d_final * (T(1) - gate) * p_vocab(y);
      // Gate.
      const T d_gate_logit = d_final * (p_copy_y - p_vocab(y)) * gate * (T(1) - gate);
      grads.copy_weight += d_gate_logit * h;
      grads.copy_bias(0) += d_gate_logit;
      d_states.row(pos) += d_gate_logit * p.copy_weight.transpose();
      // Copy attention scores s_i = h . h_i.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (alpha(i) == T(0)) continue;
        const T indicator = pair.inputs[i] == y ? T(1) : T(0);
        const T d_score = d_final * gate * alpha(i) * (indicator - p_copy_y);
        d_states.row(pos) += d_score * states.row(i);
        d_states.row(i) += d_score * h.transpose();
      }
    }
    grads.head_bias += d_logits;
    grads.head_weight.noalias() += d_logits * h.transpose();
    d_states.row(pos).noalias() += (p.head_weight.transpose() * d_logits).transpose();
    ++result.tokens;
  }
  model.Backward(c, d_states, grads);
  return result;
}

template <typename T>
double TeacherForcingLoss(const Transformer<T>& model, const EncodedPair& pair, bool copy_enabled) {
  const MatrixT<T> states = model.Forward(pair.inputs);
  double nll = 0;
  std::size_t tokens = 0;
  for (Eigen::Index pos = static_cast<Eigen::Index>(pair.context_size) - 1; pos < states.rows();
       ++pos) {
    const auto dist = NextTokenDistribution<T>(model, states, pos, pair.inputs, pair.copy_mask,
                                               copy_enabled);
    nll -= std::log(static_cast<double>(dist.final_dist(pair.labels[pos])));
    ++tokens;
  }
  if (!std::isfinite(nll)) throw Error(ErrorKind::kDivergence, "non-finite loss");
  return nll / static_cast<double>(tokens);
}

template LossResult LossAndGradient<float>(const Transformer<float>&, const EncodedPair&, bool,
                                           float, Parameters<float>&, ForwardCache<float>*);
template LossResult LossAndGradient<double>(const Transformer<double>&, const EncodedPair&, bool,
                                            double, Parameters<double>&, ForwardCache<double>*);
template double TeacherForcingLoss<float>(const Transformer<float>&, const EncodedPair&, bool);
template double TeacherForcingLoss<double>(const Transformer<double>&, const EncodedPair&, bool);

int EpochsForFraction(int denominator) {
  if (denominator <= 1) return 10;
  if (denominator <= 16) return 20;
  return 40;
}

void TrainConfig::Validate() const {
  if (epochs < 0) throw Error(ErrorKind::kConfig, "epochs must be >= 0");
  if (!(learning_rate > 0)) throw Error(ErrorKind::kConfig, "learning rate must be > 0");
  if (batch_size < 1) throw Error(ErrorKind::kConfig, "batch size must be >= 1");
  if (!(negative_keep > 0 && negative_keep <= 1)) {
    throw Error(ErrorKind::kConfig, "negative_keep must be in (0, 1]");
  }
}

std::string TrainHistory::ToCsv() const {
  std::ostringstream out;
  out.precision(9);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < epoch_loss.size(); ++i) out << i + 1 << ',' << epoch_loss[i] << '\n';
  return out.str();
}

AdamW::AdamW(const TrainConfig& config, Parameters<float>& params) : config_(config) {
  for (const auto& t : params.Tensors()) {
    m_.emplace_back(static_cast<std::size_t>(t.size), 0.0f);
    v_.emplace_back(static_cast<std::size_t>(t.size), 0.0f);
  }
}

void AdamW::Step(Parameters<float>& params, Parameters<float>& grads,
                 const std::function<bool(const TensorRef<float>&)>& include) {
  ++step_;
  const float lr = static_cast<float>(config_.learning_rate);
  const float b1 = static_cast<float>(config_.beta1);
  const float b2 = static_cast<float>(config_.beta2);
  const float eps = static_cast<float>(config_.adam_eps);
  const float wd = static_cast<float>(config_.weight_decay);
  const float bias1 = 1.0f - static_cast<float>(std::pow(config_.beta1, step_));
  const float bias2 = 1.0f - static_cast<float>(std::pow(config_.beta2, step_));
  auto tensors = params.Tensors();
  auto grad_tensors = grads.Tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    if (!include(tensors[k])) continue;
    float* w = tensors[k].data;
    const float* g = grad_tensors[k].data;
    float* m = m_[k].data();
    float* v = v_[k].data();
    const float decay = tensors[k].decays ? wd : 0.0f;
    for (Eigen::Index i = 0; i < tensors[k].size; ++i) {
      m[i] = b1 * m[i] + (1.0f - b1) * g[i];
      v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
      const float m_hat = m[i] / bias1;
      const float v_hat = v[i] / bias2;
      w[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps) + decay * w[i]);
    }
  }
}

double ClipGradNorm(Parameters<float>& grads, double max_norm) {
  double sq = 0;
  for (const auto& t : grads.Tensors()) {
    for (Eigen::Index i = 0; i < t.size; ++i) sq += static_cast<double>(t.data[i]) * t.data[i];
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const float scale = static_cast<float>(max_norm / norm);
    for (auto& t : grads.Tensors()) {
      for (Eigen::Index i = 0; i < t.size; ++i) t.data[i] *= scale;
    }
  }
  return norm;
}

TrainHistory Train(Model& model, const Vocab& vocab, const std::vector<EncodedPair>& pairs,
                   const TrainConfig& config, const EpochCallback& on_epoch) {
  (void)vocab;
  config.Validate();
  TrainHistory history;
  if (pairs.empty() || config.epochs == 0) return history;
  Parameters<float> grads = Parameters<float>::Zeros(model.config());
  AdamW optimizer(config, model.params());
  Rng rng(DeriveSeed(config.seed, "shuffle"));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  ForwardCache<float> cache;
  const bool copy = config.copy_enabled;
  auto include = [copy](const TensorRef<float>& t) { return copy || !t.copy_head; };
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(order.begin(), order.end(), rng);
    double epoch_nll = 0;
    std::size_t epoch_tokens = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::size_t batch_tokens = 0;
      for (std::size_t k = begin; k < end; ++k) batch_tokens += pairs[order[k]].target_size();
      const float weight = 1.0f / static_cast<float>(batch_tokens);
      grads.SetZero();
      for (std::size_t k = begin; k < end; ++k) {
        const LossResult r = LossAndGradient<float>(model, pairs[order[k]], copy, weight, grads, &cache);
        epoch_nll += r.nll_sum;
        epoch_tokens += r.tokens;
      }
      ClipGradNorm(grads, config.clip_norm);
      optimizer.Step(model.params(), grads, include);
      ++history.steps;
    }
    const double loss = epoch_nll / static_cast<double>(epoch_tokens);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::kDivergence, "training diverged in epoch " + std::to_string(epoch + 1));
    }
    history.epoch_loss.push_back(loss);
    if (on_epoch) on_epoch(epoch + 1, loss);
  }
  return history;
}

TrainHistory Train(Model& model, const Vocab& vocab, const Dataset& dataset, const NameMap& names,
                   const TrainConfig& config, const EpochCallback& on_epoch) {
  const auto pairs = BuildTrainingPairs(dataset, names, config.template_style,
                                        config.negative_keep, config.seed);
  std::vector<EncodedPair> encoded;
  encoded.reserve(pairs.size());
  for (const TrainingPair& p : pairs) {
    encoded.push_back(EncodePair(vocab, p, dataset.examples[p.example_index].utterance,
                                 config.copy_source));
  }
  return Train(model, vocab, encoded, config, on_epoch);
}

}  // namespace gensf
