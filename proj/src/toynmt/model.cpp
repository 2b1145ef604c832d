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

#include "lsmask/toynmt/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "lsmask/error.hpp"
#include "lsmask/loss.hpp"
#include "lsmask/toynmt/random.hpp"

namespace lsmask::toynmt {

namespace {

constexpr double kNormEps = 1e-5;

struct NormTrace {
  Mat xhat;
  Vec inv_std;
};

struct AttentionTrace {
  Mat q, k, v;
  std::vector<Mat> weights;  // per head, rows x keys
  Mat context;
};

struct FfnTrace {
  Mat pre;
  Mat act;
};

}  // namespace

struct EncoderLayerTrace {
  Mat input;
  NormTrace attn_norm;
  Mat attn_in;
  AttentionTrace attn;
  Mat attn_drop;
  Mat mid;
  NormTrace ffn_norm;
  Mat ffn_in;
  FfnTrace ffn;
  Mat ffn_drop;
};

struct DecoderLayerTrace {
  Mat input;
  NormTrace self_norm;
  Mat self_in;
  AttentionTrace self_attn;
  Mat self_drop;
  Mat after_self;
  NormTrace cross_norm;
  Mat cross_in;
  AttentionTrace cross_attn;
  Mat cross_drop;
  Mat after_cross;
  NormTrace ffn_norm;
  Mat ffn_in;
  FfnTrace ffn;
  Mat ffn_drop;
};

struct ForwardTrace {
  TokenIds src;
  TokenIds dec_in;
  Mat enc_embed_drop;
  Mat dec_embed_drop;
  std::vector<EncoderLayerTrace> encoder;
  NormTrace enc_final;
  Mat memory;
  std::vector<DecoderLayerTrace> decoder;
  NormTrace dec_final;
  Mat hidden;
};

namespace {

// Dropout sites.
constexpr std::uint64_t kEncoderSide = 1;
constexpr std::uint64_t kDecoderSide = 2;
constexpr std::uint64_t site(std::uint64_t side, std::uint64_t layer, std::uint64_t slot) {
  return (side << 32) | (layer << 8) | slot;
}

/// Scaled keep-mask (0 or 1/(1-p)); empty when dropout is inactive.
Mat dropout_mask(const DropoutKey* key, double rate, Eigen::Index rows, Eigen::Index cols, std::uint64_t where) {
  if (key == nullptr || rate <= 0.0) return Mat();
  Mat mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto element = static_cast<std::uint64_t>(r * cols + c);
      const double u = counter_uniform(key->seed, key->step, key->sequence, where, element);
      mask(r, c) = u < rate ? 0.0 : keep_scale;
    }
  return mask;
}

Mat apply_mask(const Mat& x, const Mat& mask) {
  if (mask.size() == 0) return x;
  return x.cwiseProduct(mask);
}

Mat layer_norm(const Mat& x, const LayerNormParams& p, NormTrace& t) {
  const auto d = static_cast<double>(x.cols());
  t.xhat.resize(x.rows(), x.cols());
  t.inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / d;
    const auto centered = x.row(r).array() - mean;
    const double var = centered.square().sum() / d;
    t.inv_std[r] = 1.0 / std::sqrt(var + kNormEps);
    t.xhat.row(r) = (centered * t.inv_std[r]).matrix();
  }
  return (t.xhat.array().rowwise() * p.gain.transpose().array()).rowwise() + p.bias.transpose().array();
}

Mat layer_norm_backward(const Mat& dy, const NormTrace& t, const LayerNormParams& p, LayerNormParams& g) {
  g.gain += dy.cwiseProduct(t.xhat).colwise().sum().transpose();
  g.bias += dy.colwise().sum().transpose();
  const Mat dxhat = dy.array().rowwise() * p.gain.transpose().array();
  const auto d = static_cast<double>(dy.cols());
  Mat dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_dxhat = dxhat.row(r).sum() / d;
    const double mean_dxhat_xhat = dxhat.row(r).dot(t.xhat.row(r)) / d;
    dx.row(r) = t.inv_std[r] * (dxhat.row(r).array() - mean_dxhat - t.xhat.row(r).array() * mean_dxhat_xhat).matrix();
  }
  return dx;
}

Mat linear(const Mat& x, const LinearParams& p) { return (x * p.weight).rowwise() + p.bias.transpose(); }

Mat linear_backward(const Mat& dy, const Mat& x, const LinearParams& p, LinearParams& g) {
  g.weight.noalias() += x.transpose() * dy;
  g.bias += dy.colwise().sum().transpose();
  return dy * p.weight.transpose();
}

Mat attention(const Mat& xq, const Mat& xkv, const AttentionParams& p, std::size_t heads, bool causal,
              AttentionTrace& t) {
  t.q = linear(xq, p.query);
  t.k = linear(xkv, p.key);
  t.v = linear(xkv, p.value);
  const Eigen::Index n = xq.rows();
  const Eigen::Index m = xkv.rows();
  const auto dh = static_cast<Eigen::Index>(p.query.weight.cols() / static_cast<Eigen::Index>(heads));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  t.context.resize(n, p.query.weight.cols());
  t.weights.resize(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Eigen::Index off = static_cast<Eigen::Index>(h) * dh;
    Mat scores = (t.q.middleCols(off, dh) * t.k.middleCols(off, dh).transpose()) * scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index visible = causal ? std::min(i + 1, m) : m;
      auto row = scores.row(i);
      const double shift = row.head(visible).maxCoeff();
      row.head(visible) = (row.head(visible).array() - shift).exp().matrix();
      row.head(visible) /= row.head(visible).sum();
      row.tail(m - visible).setZero();
    }
    t.context.middleCols(off, dh).noalias() = scores * t.v.middleCols(off, dh);
    t.weights[h] = std::move(scores);
  }
  return linear(t.context, p.output);
}

/// Returns d/dxq; adds d/dxkv into dxkv (which must be sized).
Mat attention_backward(const Mat& dy, const Mat& xq, const Mat& xkv, const AttentionParams& p, const AttentionTrace& t,
                       std::size_t heads, AttentionParams& g, Mat& dxkv) {
  const Mat dctx = linear_backward(dy, t.context, p.output, g.output);
  const auto dh = static_cast<Eigen::Index>(p.query.weight.cols() / static_cast<Eigen::Index>(heads));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Mat dq(t.q.rows(), t.q.cols());
  Mat dk(t.k.rows(), t.k.cols());
  Mat dv(t.v.rows(), t.v.cols());
  for (std::size_t h = 0; h < heads; ++h) {
    const Eigen::Index off = static_cast<Eigen::Index>(h) * dh;
    const Mat& a = t.weights[h];
    const Mat dout = dctx.middleCols(off, dh);
    const Mat da = dout * t.v.middleCols(off, dh).transpose();
    dv.middleCols(off, dh).noalias() = a.transpose() * dout;
    const Vec row_dot = da.cwiseProduct(a).rowwise().sum();
    const Mat ds = (a.array() * (da.colwise() - row_dot).array()).matrix() * scale;
    dq.middleCols(off, dh).noalias() = ds * t.k.middleCols(off, dh);
    dk.middleCols(off, dh).noalias() = ds.transpose() * t.q.middleCols(off, dh);
  }
  dxkv += linear_backward(dk, xkv, p.key, g.key);
  dxkv += linear_backward(dv, xkv, p.value, g.value);
  return linear_backward(dq, xq, p.query, g.query);
}

// tanh approximation of GELU
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

Mat feed_forward(const Mat& x, const FeedForwardParams& p, FfnTrace& t) {
  t.pre = linear(x, p.inner);
  t.act = t.pre.unaryExpr([](double u) { return 0.5 * u * (1.0 + std::tanh(kGeluC * (u + kGeluA * u * u * u))); });
  return linear(t.act, p.outer);
}

Mat feed_forward_backward(const Mat& dy, const Mat& x, const FeedForwardParams& p, const FfnTrace& t,
                          FeedForwardParams& g) {
  const Mat dact = linear_backward(dy, t.act, p.outer, g.outer);
  const Mat dpre = dact.binaryExpr(t.pre, [](double d, double u) {
    const double th = std::tanh(kGeluC * (u + kGeluA * u * u * u));
    const double deriv = 0.5 * (1.0 + th) + 0.5 * u * (1.0 - th * th) * kGeluC * (1.0 + 3.0 * kGeluA * u * u);
    return d * deriv;
  });
  return linear_backward(dpre, x, p.inner, g.inner);
}

Mat embed(const Parameters& p, const Mat& positions, const TokenIds& ids) {
  Mat x(static_cast<Eigen::Index>(ids.size()), p.embedding.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x.row(r) = p.embedding.row(ids[i]) + positions.row(r);
  }
  return x;
}

void embed_backward(const Mat& dx, const TokenIds& ids, Mat& dembedding, Mat& dpositions) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    dembedding.row(ids[i]) += dx.row(r);
    dpositions.row(r) += dx.row(r);
  }
}

void check_ids(const TokenIds& ids, std::size_t vocab, std::size_t max_positions, const char* what) {
  if (ids.empty()) throw Error(Errc::LengthMismatch, std::string(what) + " sequence is empty");
  if (ids.size() > max_positions)
    throw Error(Errc::LengthMismatch, std::string(what) + " sequence longer than max_positions");
  for (TokenId id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= vocab)
      throw Error(Errc::IndexOutOfRange, std::string(what) + " token id " + std::to_string(id));
}

}  // namespace

void ModelConfig::validate() const {
  if (layers < 1 || model_dim < 1 || heads < 1 || ffn_dim < 1 || max_positions < 1)
    throw Error(Errc::InvalidConfig, "model sizes must be >= 1");
  if (model_dim % heads != 0) throw Error(Errc::InvalidConfig, "model_dim must be divisible by heads");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(Errc::InvalidConfig, "dropout must lie in [0, 1)");
}

Parameters zeros_like(const Parameters& p) {
  Parameters z = p;
  visit_tensors([](auto& t) { t.setZero(); }, z);
  return z;
}

std::size_t parameter_count(const Parameters& p) {
  std::size_t n = 0;
  Parameters& mut = const_cast<Parameters&>(p);
  visit_tensors([&](auto& t) { n += static_cast<std::size_t>(t.size()); }, mut);
  return n;
}

Vec flatten(const Parameters& p) {
  Vec flat(static_cast<Eigen::Index>(parameter_count(p)));
  Eigen::Index off = 0;
  Parameters& mut = const_cast<Parameters&>(p);
  visit_tensors(
      [&](auto& t) {
        flat.segment(off, t.size()) = Eigen::Map<const Vec>(t.data(), t.size());
        off += t.size();
      },
      mut);
  return flat;
}

void unflatten(const Vec& flat, Parameters& p) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count(p))
    throw Error(Errc::LengthMismatch, "flat parameter vector has the wrong size");
  Eigen::Index off = 0;
  visit_tensors(
      [&](auto& t) {
        Eigen::Map<Vec>(t.data(), t.size()) = flat.segment(off, t.size());
        off += t.size();
      },
      p);
}

Model::Model(const ModelConfig& config, std::size_t vocab_size, Parameters params)
    : config_(config), vocab_size_(vocab_size), params_(std::move(params)) {
  config_.validate();
  if (static_cast<std::size_t>(params_.embedding.rows()) != vocab_size ||
      static_cast<std::size_t>(params_.embedding.cols()) != config_.model_dim ||
      params_.encoder.size() != config_.layers || params_.decoder.size() != config_.layers)
    throw Error(Errc::InvalidConfig, "parameters do not match the model config");
}

Mat Model::logits(const TokenIds& src, const TokenIds& dec_in, const DropoutKey* dropout) const {
  ForwardTrace trace;
  return forward(src, dec_in, dropout, trace);
}

Mat Model::next_token_probs(const TokenIds& src, const TokenIds& dec_in) const {
  return softmax_rows(logits(src, dec_in));
}

Mat Model::forward_backward(const TokenIds& src, const TokenIds& dec_in, const DropoutKey* dropout,
                            const std::function<Mat(const Mat& logits)>& loss_grad, Parameters& grads) const {
  ForwardTrace trace;
  Mat z = forward(src, dec_in, dropout, trace);
  const Mat dz = loss_grad(z);
  if (dz.rows() != z.rows() || dz.cols() != z.cols())
    throw Error(Errc::LengthMismatch, "logit gradient has the wrong shape");
  backward(trace, dz, grads);
  return z;
}

Mat Model::forward(const TokenIds& src, const TokenIds& dec_in, const DropoutKey* dropout, ForwardTrace& t) const {
  check_ids(src, vocab_size_, config_.max_positions, "source");
  check_ids(dec_in, vocab_size_, config_.max_positions, "decoder input");
  const std::size_t heads = config_.heads;
  const double rate = config_.dropout;
  t.src = src;
  t.dec_in = dec_in;

  Mat x = embed(params_, params_.enc_positions, src);
  t.enc_embed_drop = dropout_mask(dropout, rate, x.rows(), x.cols(), site(kEncoderSide, 0, 0));
  x = apply_mask(x, t.enc_embed_drop);
  t.encoder.resize(config_.layers);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const EncoderLayerParams& p = params_.encoder[l];
    EncoderLayerTrace& lt = t.encoder[l];
    lt.input = x;
    lt.attn_in = layer_norm(x, p.attn_norm, lt.attn_norm);
    Mat y = attention(lt.attn_in, lt.attn_in, p.self_attn, heads, false, lt.attn);
    lt.attn_drop = dropout_mask(dropout, rate, y.rows(), y.cols(), site(kEncoderSide, l + 1, 1));
    lt.mid = x + apply_mask(y, lt.attn_drop);
    lt.ffn_in = layer_norm(lt.mid, p.ffn_norm, lt.ffn_norm);
    Mat f = feed_forward(lt.ffn_in, p.ffn, lt.ffn);
    lt.ffn_drop = dropout_mask(dropout, rate, f.rows(), f.cols(), site(kEncoderSide, l + 1, 2));
    x = lt.mid + apply_mask(f, lt.ffn_drop);
  }
  t.memory = layer_norm(x, params_.enc_final, t.enc_final);

  Mat h = embed(params_, params_.dec_positions, dec_in);
  t.dec_embed_drop = dropout_mask(dropout, rate, h.rows(), h.cols(), site(kDecoderSide, 0, 0));
  h = apply_mask(h, t.dec_embed_drop);
  t.decoder.resize(config_.layers);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const DecoderLayerParams& p = params_.decoder[l];
    DecoderLayerTrace& lt = t.decoder[l];
    lt.input = h;
    lt.self_in = layer_norm(h, p.self_norm, lt.self_norm);
    Mat y = attention(lt.self_in, lt.self_in, p.self_attn, heads, true, lt.self_attn);
    lt.self_drop = dropout_mask(dropout, rate, y.rows(), y.cols(), site(kDecoderSide, l + 1, 1));
    lt.after_self = h + apply_mask(y, lt.self_drop);
    lt.cross_in = layer_norm(lt.after_self, p.cross_norm, lt.cross_norm);
    Mat c = attention(lt.cross_in, t.memory, p.cross_attn, heads, false, lt.cross_attn);
    lt.cross_drop = dropout_mask(dropout, rate, c.rows(), c.cols(), site(kDecoderSide, l + 1, 2));
    lt.after_cross = lt.after_self + apply_mask(c, lt.cross_drop);
    lt.ffn_in = layer_norm(lt.after_cross, p.ffn_norm, lt.ffn_norm);
    Mat f = feed_forward(lt.ffn_in, p.ffn, lt.ffn);
    lt.ffn_drop = dropout_mask(dropout, rate, f.rows(), f.cols(), site(kDecoderSide, l + 1, 3));
    h = lt.after_cross + apply_mask(f, lt.ffn_drop);
  }
  t.hidden = layer_norm(h, params_.dec_final, t.dec_final);
  return t.hidden * params_.embedding.transpose();
}

void Model::backward(const ForwardTrace& t, const Mat& dlogits, Parameters& g) const {
  const std::size_t heads = config_.heads;
  g.embedding.noalias() += dlogits.transpose() * t.hidden;
  Mat dh = dlogits * params_.embedding;
  dh = layer_norm_backward(dh, t.dec_final, params_.dec_final, g.dec_final);

  Mat dmemory = Mat::Zero(t.memory.rows(), t.memory.cols());
  for (std::size_t l = config_.layers; l-- > 0;) {
    const DecoderLayerParams& p = params_.decoder[l];
    DecoderLayerParams& gp = g.decoder[l];
    const DecoderLayerTrace& lt = t.decoder[l];
    // h = after_cross + drop(ffn(norm(after_cross)))
    Mat d_after_cross = dh;
    {
      const Mat df = apply_mask(dh, lt.ffn_drop);
      const Mat din = feed_forward_backward(df, lt.ffn_in, p.ffn, lt.ffn, gp.ffn);
      d_after_cross += layer_norm_backward(din, lt.ffn_norm, p.ffn_norm, gp.ffn_norm);
    }
    Mat d_after_self = d_after_cross;
    {
      const Mat dc = apply_mask(d_after_cross, lt.cross_drop);
      const Mat din = attention_backward(dc, lt.cross_in, t.memory, p.cross_attn, lt.cross_attn, heads,
                                         gp.cross_attn, dmemory);
      d_after_self += layer_norm_backward(din, lt.cross_norm, p.cross_norm, gp.cross_norm);
    }
    Mat d_input = d_after_self;
    {
      const Mat dy = apply_mask(d_after_self, lt.self_drop);
      Mat dkv = Mat::Zero(lt.self_in.rows(), lt.self_in.cols());
      Mat din = attention_backward(dy, lt.self_in, lt.self_in, p.self_attn, lt.self_attn, heads, gp.self_attn, dkv);
      din += dkv;
      d_input += layer_norm_backward(din, lt.self_norm, p.self_norm, gp.self_norm);
    }
    dh = std::move(d_input);
  }
  dh = apply_mask(dh, t.dec_embed_drop);
  embed_backward(dh, t.dec_in, g.embedding, g.dec_positions);

  Mat dx = layer_norm_backward(dmemory, t.enc_final, params_.enc_final, g.enc_final);
  for (std::size_t l = config_.layers; l-- > 0;) {
    const EncoderLayerParams& p = params_.encoder[l];
    EncoderLayerParams& gp = g.encoder[l];
    const EncoderLayerTrace& lt = t.encoder[l];
    Mat d_mid = dx;
    {
      const Mat df = apply_mask(dx, lt.ffn_drop);
      const Mat din = feed_forward_backward(df, lt.ffn_in, p.ffn, lt.ffn, gp.ffn);
      d_mid += layer_norm_backward(din, lt.ffn_norm, p.ffn_norm, gp.ffn_norm);
    }
    Mat d_input = d_mid;
    {
      const Mat dy = apply_mask(d_mid, lt.attn_drop);
      Mat dkv = Mat::Zero(lt.attn_in.rows(), lt.attn_in.cols());
      Mat din = attention_backward(dy, lt.attn_in, lt.attn_in, p.self_attn, lt.attn, heads, gp.self_attn, dkv);
      din += dkv;
      d_input += layer_norm_backward(din, lt.attn_norm, p.attn_norm, gp.attn_norm);
    }
    dx = std::move(d_input);
  }
  dx = apply_mask(dx, t.enc_embed_drop);
  embed_backward(dx, t.src, g.embedding, g.enc_positions);
}

namespace {

void init_uniform(Mat& m, Rng& rng, double bound) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
}

LinearParams make_linear(std::size_t in, std::size_t out, Rng& rng) {
  LinearParams p{Mat(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out)),
                 Vec::Zero(static_cast<Eigen::Index>(out))};
  init_uniform(p.weight, rng, std::sqrt(6.0 / static_cast<double>(in + out)));
  return p;
}

LayerNormParams make_norm(std::size_t dim) {
  return {Vec::Ones(static_cast<Eigen::Index>(dim)), Vec::Zero(static_cast<Eigen::Index>(dim))};
}

AttentionParams make_attention(std::size_t dim, Rng& rng) {
  AttentionParams p;
  p.query = make_linear(dim, dim, rng);
  p.key = make_linear(dim, dim, rng);
  p.value = make_linear(dim, dim, rng);
  p.output = make_linear(dim, dim, rng);
  return p;
}

FeedForwardParams make_ffn(std::size_t dim, std::size_t hidden, Rng& rng) {
  FeedForwardParams p;
  p.inner = make_linear(dim, hidden, rng);
  p.outer = make_linear(hidden, dim, rng);
  return p;
}

constexpr char kMagic[8] = {'L', 'S', 'M', 'M', 'O', 'D', 'L', '1'};

}  // namespace

Model init_model(const ModelConfig& config, std::size_t vocab_size) {
  config.validate();
  if (vocab_size < 1) throw Error(Errc::InvalidConfig, "vocabulary size must be >= 1");
  Rng rng(config.init_seed);
  const std::size_t d = config.model_dim;
  const auto rows = [](std::size_t n) { return static_cast<Eigen::Index>(n); };
  // Unit-variance uniform scaled to std 1/sqrt(d).
  const double embed_bound = std::sqrt(3.0 / static_cast<double>(d));

  Parameters p;
  p.embedding.resize(rows(vocab_size), rows(d));
  init_uniform(p.embedding, rng, embed_bound);
  p.enc_positions.resize(rows(config.max_positions), rows(d));
  init_uniform(p.enc_positions, rng, embed_bound);
  p.dec_positions.resize(rows(config.max_positions), rows(d));
  init_uniform(p.dec_positions, rng, embed_bound);
  for (std::size_t l = 0; l < config.layers; ++l) {
    EncoderLayerParams e;
    e.attn_norm = make_norm(d);
    e.self_attn = make_attention(d, rng);
    e.ffn_norm = make_norm(d);
    e.ffn = make_ffn(d, config.ffn_dim, rng);
    p.encoder.push_back(std::move(e));
  }
  p.enc_final = make_norm(d);
  for (std::size_t l = 0; l < config.layers; ++l) {
    DecoderLayerParams dl;
    dl.self_norm = make_norm(d);
    dl.self_attn = make_attention(d, rng);
    dl.cross_norm = make_norm(d);
    dl.cross_attn = make_attention(d, rng);
    dl.ffn_norm = make_norm(d);
    dl.ffn = make_ffn(d, config.ffn_dim, rng);
    p.decoder.push_back(std::move(dl));
  }
  p.dec_final = make_norm(d);
  return Model(config, vocab_size, std::move(p));
}

void save_model(const Model& model, const std::string& path) {
  const Vec flat = flatten(model.params());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write '" + path + "'");
  const std::uint64_t n = static_cast<std::uint64_t>(flat.size());
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(flat.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!out) throw Error(Errc::Io, "cannot write '" + path + "'");
}

Model load_model(const ModelConfig& config, std::size_t vocab_size, const std::string& path) {
  Model model = init_model(config, vocab_size);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  char magic[sizeof kMagic];
  std::uint64_t n = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw Error(Errc::Io, "'" + path + "' is not a model file");
  if (n != parameter_count(model.params()))
    throw Error(Errc::Io, "'" + path + "' holds " + std::to_string(n) + " parameters, config expects " +
                              std::to_string(parameter_count(model.params())));
  Vec flat(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw Error(Errc::Io, "'" + path + "' is truncated");
  unflatten(flat, model.params());
  return model;
}

}  // namespace lsmask::toynmt
