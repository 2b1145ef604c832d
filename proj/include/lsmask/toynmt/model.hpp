// Copyright 2026 The lsmask Authors. All Rights Reserved.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lsmask/toynmt/synthetic.hpp"
#include "lsmask/types.hpp"

namespace lsmask::toynmt {

/// Toy-scale Transformer dimensions. The full-scale baseline is the base
/// Transformer (6 layers, 512 dims, 8 heads, 2048 FFN, dropout 0.3).
struct ModelConfig {
  std::size_t layers = 2;
  std::size_t model_dim = 64;
  std::size_t heads = 2;
  std::size_t ffn_dim = 128;
  double dropout = 0.1;
  std::size_t max_positions = 64;
  std::uint64_t init_seed = 1;

  /// Throws InvalidConfig.
  void validate() const;
  std::size_t head_dim() const { return model_dim / heads; }
};

struct LayerNormParams {
  Vec gain;
  Vec bias;
};

/// y = x * weight + bias, weight is (in x out).
struct LinearParams {
  Mat weight;
  Vec bias;
};

struct AttentionParams {
  LinearParams query, key, value, output;
};

struct FeedForwardParams {
  LinearParams inner, outer;
};

struct EncoderLayerParams {
  LayerNormParams attn_norm, ffn_norm;
  AttentionParams self_attn;
  FeedForwardParams ffn;
};

struct DecoderLayerParams {
  LayerNormParams self_norm, cross_norm, ffn_norm;
  AttentionParams self_attn, cross_attn;
  FeedForwardParams ffn;
};

/// Every trainable tensor. The token embedding is shared by encoder input,
/// decoder input and the output projection.
struct Parameters {
  Mat embedding;  // vocab x dim
  Mat enc_positions;
  Mat dec_positions;
  std::vector<EncoderLayerParams> encoder;
  std::vector<DecoderLayerParams> decoder;
  LayerNormParams enc_final, dec_final;
};

namespace detail {

template <typename F, typename... P>
void visit_linear(F& f, P&... p) {
  f(p.weight...);
  f(p.bias...);
}
template <typename F, typename... P>
void visit_norm(F& f, P&... p) {
  f(p.gain...);
  f(p.bias...);
}
template <typename F, typename... P>
void visit_attention(F& f, P&... p) {
  visit_linear(f, p.query...);
  visit_linear(f, p.key...);
  visit_linear(f, p.value...);
  visit_linear(f, p.output...);
}
template <typename F, typename... P>
void visit_ffn(F& f, P&... p) {
  visit_linear(f, p.inner...);
  visit_linear(f, p.outer...);
}

}  // namespace detail

/// Calls f on corresponding tensors of each Parameters argument, in a fixed
/// order. All arguments must share one shape.
template <typename F, typename First, typename... Rest>
void visit_tensors(F&& f, First& first, Rest&... rest) {
  f(first.embedding, rest.embedding...);
  f(first.enc_positions, rest.enc_positions...);
  f(first.dec_positions, rest.dec_positions...);
  for (std::size_t l = 0; l < first.encoder.size(); ++l) {
    detail::visit_norm(f, first.encoder[l].attn_norm, rest.encoder[l].attn_norm...);
    detail::visit_attention(f, first.encoder[l].self_attn, rest.encoder[l].self_attn...);
    detail::visit_norm(f, first.encoder[l].ffn_norm, rest.encoder[l].ffn_norm...);
    detail::visit_ffn(f, first.encoder[l].ffn, rest.encoder[l].ffn...);
  }
  detail::visit_norm(f, first.enc_final, rest.enc_final...);
  for (std::size_t l = 0; l < first.decoder.size(); ++l) {
    detail::visit_norm(f, first.decoder[l].self_norm, rest.decoder[l].self_norm...);
    detail::visit_attention(f, first.decoder[l].self_attn, rest.decoder[l].self_attn...);
    detail::visit_norm(f, first.decoder[l].cross_norm, rest.decoder[l].cross_norm...);
    detail::visit_attention(f, first.decoder[l].cross_attn, rest.decoder[l].cross_attn...);
    detail::visit_norm(f, first.decoder[l].ffn_norm, rest.decoder[l].ffn_norm...);
    detail::visit_ffn(f, first.decoder[l].ffn, rest.decoder[l].ffn...);
  }
  detail::visit_norm(f, first.dec_final, rest.dec_final...);
}

/// Same shapes, all zeros.
Parameters zeros_like(const Parameters& p);
std::size_t parameter_count(const Parameters& p);
/// Flattens in visit order.
Vec flatten(const Parameters& p);
void unflatten(const Vec& flat, Parameters& p);

/// Identifies the dropout masks of one training sequence. Masks are a pure
/// function of (seed, step, sequence, site, element), so evaluation order
/// cannot change them.
struct DropoutKey {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint64_t sequence = 0;
};

/// Anything that yields next-token distributions for a decoder prefix.
class SequenceScorer {
 public:
  virtual ~SequenceScorer() = default;
  virtual std::size_t vocab_size() const = 0;
  /// Row t is the distribution of the token following dec_in[0..t].
  virtual Mat next_token_probs(const TokenIds& src, const TokenIds& dec_in) const = 0;
};

struct ForwardTrace;

class Model : public SequenceScorer {
 public:
  Model(const ModelConfig& config, std::size_t vocab_size, Parameters params);

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t vocab_size() const override { return vocab_size_; }
  const Parameters& params() const noexcept { return params_; }
  Parameters& params() noexcept { return params_; }

  /// Logits (dec_in.size() x vocab). Dropout is applied only when a key is
  /// given and the configured rate is positive.
  Mat logits(const TokenIds& src, const TokenIds& dec_in, const DropoutKey* dropout = nullptr) const;
  Mat next_token_probs(const TokenIds& src, const TokenIds& dec_in) const override;

  /// One training pass over a sequence: computes logits, asks `loss_grad` for
  /// d(loss)/d(logits), and accumulates d(loss)/d(params) into grads. Returns
  /// the logits.
  Mat forward_backward(const TokenIds& src, const TokenIds& dec_in, const DropoutKey* dropout,
                       const std::function<Mat(const Mat& logits)>& loss_grad, Parameters& grads) const;

 private:
  Mat forward(const TokenIds& src, const TokenIds& dec_in, const DropoutKey* dropout, ForwardTrace& trace) const;
  void backward(const ForwardTrace& trace, const Mat& dlogits, Parameters& grads) const;

  ModelConfig config_;
  std::size_t vocab_size_;
  Parameters params_;
};

/// Deterministic initialization from config.init_seed. Throws InvalidConfig.
Model init_model(const ModelConfig& config, std::size_t vocab_size);

/// Binary parameter dump: magic, parameter count, raw doubles in host byte
/// order (the file is not portable across endianness).
void save_model(const Model& model, const std::string& path);
/// Loads into a freshly initialized model of the given shape; throws Io on a
/// shape or format mismatch.
Model load_model(const ModelConfig& config, std::size_t vocab_size, const std::string& path);

}  // namespace lsmask::toynmt
