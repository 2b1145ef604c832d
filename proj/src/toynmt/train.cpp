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

#include "lsmask/toynmt/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsmask/error.hpp"
#include "lsmask/loss.hpp"
#include "lsmask/toynmt/random.hpp"

namespace lsmask::toynmt {

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(Errc::InvalidConfig, "learning rate must be > 0");
  if (!(warmup_init_lr >= 0.0)) throw Error(Errc::InvalidConfig, "warmup_init_lr must be >= 0");
  if (max_steps < 1) throw Error(Errc::InvalidConfig, "max_steps must be >= 1");
  if (warmup_steps > max_steps) throw Error(Errc::InvalidConfig, "warmup_steps must not exceed max_steps");
  if (eval_interval < 1) throw Error(Errc::InvalidConfig, "eval_interval must be >= 1");
  if (batch_tokens < 1) throw Error(Errc::InvalidConfig, "batch_tokens must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw Error(Errc::InvalidConfig, "Adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw Error(Errc::InvalidConfig, "adam_eps must be > 0");
  if (!(weight_decay >= 0.0)) throw Error(Errc::InvalidConfig, "weight_decay must be >= 0");
}

double learning_rate(const TrainConfig& tc, std::size_t step) {
  const auto s = static_cast<double>(step);
  const auto w = static_cast<double>(tc.warmup_steps);
  if (step <= tc.warmup_steps) return tc.warmup_init_lr + (tc.lr - tc.warmup_init_lr) * s / w;
  return tc.lr * std::sqrt(w / s);
}

namespace {

TokenIds decoder_input(TokenId bos, const TokenIds& tgt) {
  TokenIds in{bos};
  in.insert(in.end(), tgt.begin(), tgt.end());
  return in;
}

TokenIds decoder_output(const TokenIds& tgt, TokenId eos) {
  TokenIds out = tgt;
  out.push_back(eos);
  return out;
}

struct Adam {
  Parameters m;
  Parameters v;
  std::size_t t = 0;

  explicit Adam(const Parameters& like) : m(zeros_like(like)), v(zeros_like(like)) {}

  void step(Parameters& params, Parameters& grads, const TrainConfig& tc, double lr) {
    ++t;
    const double bc1 = 1.0 - std::pow(tc.adam_beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(tc.adam_beta2, static_cast<double>(t));
    visit_tensors(
        [&](auto& p, auto& g, auto& m1, auto& m2) {
          m1 = tc.adam_beta1 * m1 + (1.0 - tc.adam_beta1) * g;
          m2 = tc.adam_beta2 * m2 + (1.0 - tc.adam_beta2) * g.cwiseAbs2();
          const auto update = ((m1.array() / bc1) / ((m2.array() / bc2).sqrt() + tc.adam_eps)).matrix();
          p = (1.0 - lr * tc.weight_decay) * p - lr * update;
        },
        params, grads, m, v);
  }
};

}  // namespace

double teacher_forced_perplexity(const SequenceScorer& scorer, const std::vector<SentencePair>& pairs, TokenId bos,
                                 TokenId eos) {
  if (pairs.empty()) throw Error(Errc::EmptyCorpus, "no pairs to score");
  double nll = 0.0;
  std::size_t count = 0;
  for (const auto& pair : pairs) {
    const Mat probs = scorer.next_token_probs(pair.src, decoder_input(bos, pair.tgt));
    const TokenIds gold = decoder_output(pair.tgt, eos);
    for (std::size_t i = 0; i < gold.size(); ++i) {
      nll -= std::log(probs(static_cast<Eigen::Index>(i), gold[i]));
      ++count;
    }
  }
  return perplexity(nll / static_cast<double>(count));
}

TrainReport train(Model& model, const ParallelCorpus& corpus, const SmoothingSpec& smoothing, const TrainConfig& tc) {
  tc.validate();
  smoothing.validate();
  if (corpus.train.empty()) throw Error(Errc::EmptyCorpus, "training split is empty");
  if (model.vocab_size() != corpus.joint.size())
    throw Error(Errc::InvalidConfig, "model vocabulary does not match the corpus joint vocabulary");
  const CategoryPartition& part = corpus.partition;
  const TokenId bos = corpus.bos_id();
  const TokenId eos = corpus.eos_id();
  const std::vector<TokenId> source_ids = part.ids_of(Category::SourceOnly);

  // Fail early on a spec that cannot be built for this partition.
  build_target(smoothing, part, eos);

  const std::vector<SentencePair> train_eval(
      corpus.train.begin(),
      corpus.train.begin() + static_cast<std::ptrdiff_t>(std::min(tc.train_eval_pairs, corpus.train.size())));

  TrainReport report;
  report.smoothing = smoothing;
  Rng order_rng(tc.seed);
  std::vector<std::size_t> order(corpus.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  order_rng.shuffle(order.begin(), order.end());
  std::size_t cursor = 0;
  std::uint64_t sequence = 0;

  Adam adam(model.params());
  Parameters grads = zeros_like(model.params());
  double interval_loss = 0.0;
  std::size_t interval_updates = 0;

  for (std::size_t step = 1; step <= tc.max_steps; ++step) {
    // Gather whole sentences until the token budget is met.
    std::vector<std::size_t> batch;
    std::size_t tokens = 0;
    while (tokens < tc.batch_tokens) {
      if (cursor == order.size()) {
        order_rng.shuffle(order.begin(), order.end());
        cursor = 0;
      }
      const std::size_t idx = order[cursor++];
      batch.push_back(idx);
      tokens += corpus.train[idx].tgt.size() + 1;
    }

    visit_tensors([](auto& g) { g.setZero(); }, grads);
    double ce_sum = 0.0;
    const double inv_tokens = 1.0 / static_cast<double>(tokens);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const SentencePair& pair = corpus.train[batch[b]];
      const TokenIds dec_in = decoder_input(bos, pair.tgt);
      const TokenIds gold = decoder_output(pair.tgt, eos);
      const DropoutKey key{tc.seed, step, sequence++};
      model.forward_backward(
          pair.src, dec_in, &key,
          [&](const Mat& logits) {
            if (!logits.allFinite()) throw Error(Errc::DivergedLoss, std::to_string(step));
            Mat dlogits(logits.rows(), logits.cols());
            for (std::size_t i = 0; i < gold.size(); ++i) {
              const auto r = static_cast<Eigen::Index>(i);
              const LabelDistribution target = build_target(smoothing, part, gold[i], &report.diagnostics);
              double source_mass = 0.0;
              for (TokenId s : source_ids) source_mass += target.probs[s];
              report.max_target_source_mass = std::max(report.max_target_source_mass, source_mass);
              if (smoothing.mode == SmoothingMode::MaskedLS && source_mass != 0.0 &&
                  part.category(gold[i]) != Category::SourceOnly)
                throw std::logic_error("masked target carries source-only mass");
              ce_sum += cross_entropy(target, logits.row(r)).soft_ce;
              dlogits.row(r) = grad_logits(target, logits.row(r)).transpose() * inv_tokens;
              ++report.target_positions;
            }
            return dlogits;
          },
          grads);
    }
    const double mean_ce = ce_sum * inv_tokens;
    if (!std::isfinite(mean_ce)) throw Error(Errc::DivergedLoss, std::to_string(step));
    adam.step(model.params(), grads, tc, learning_rate(tc, step));
    interval_loss += mean_ce;
    ++interval_updates;
    report.steps = step;

    if (step % tc.eval_interval == 0 || step == tc.max_steps) {
      Checkpoint cp;
      cp.step = step;
      cp.train_loss = interval_loss / static_cast<double>(interval_updates);
      try {
        cp.train_ppl = teacher_forced_perplexity(model, train_eval, bos, eos);
        cp.dev_ppl = corpus.dev.empty() ? cp.train_ppl : teacher_forced_perplexity(model, corpus.dev, bos, eos);
      } catch (const Error& e) {
        if (e.code() != Errc::NonFiniteInput) throw;
        throw Error(Errc::DivergedLoss, std::to_string(step));
      }
      if (!std::isfinite(cp.train_ppl) || !std::isfinite(cp.dev_ppl))
        throw Error(Errc::DivergedLoss, std::to_string(step));
      report.curve.push_back(cp);
      interval_loss = 0.0;
      interval_updates = 0;
    }
  }
  return report;
}

}  // namespace lsmask::toynmt
