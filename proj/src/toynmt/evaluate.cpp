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

#include "lsmask/toynmt/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "lsmask/error.hpp"
#include "lsmask/loss.hpp"

namespace lsmask::toynmt {

namespace {

Eigen::Index argmax_lowest(const Eigen::Ref<const Vec>& row) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = i;
  return best;
}

}  // namespace

DecodeResult greedy_decode(const SequenceScorer& scorer, const TokenIds& src, std::size_t max_len, TokenId bos,
                           TokenId eos) {
  DecodeResult out;
  TokenIds prefix{bos};
  while (out.tokens.size() < max_len) {
    const Mat probs = scorer.next_token_probs(src, prefix);
    const Vec last = probs.row(probs.rows() - 1).transpose();
    out.max_row_sum_error = std::max(out.max_row_sum_error, std::abs(last.sum() - 1.0));
    const Eigen::Index best = argmax_lowest(last);
    out.predictions.push_back(best);
    out.confidences.push_back(last[best]);
    if (best == eos) break;
    out.tokens.push_back(best);
    prefix.push_back(best);
  }
  return out;
}

EvalMetrics evaluate(const SequenceScorer& scorer, const std::vector<SentencePair>& pairs, const ParallelCorpus& corpus,
                     std::size_t bins, std::size_t decode_extra, std::size_t max_positions) {
  if (pairs.empty()) throw Error(Errc::EmptyCorpus, "no pairs to evaluate");
  const TokenId bos = corpus.bos_id();
  const TokenId eos = corpus.eos_id();
  const std::vector<TokenId> source_ids = corpus.partition.ids_of(Category::SourceOnly);

  std::vector<PredictionSample> forced;
  std::vector<PredictionSample> inferred;
  std::vector<TokenSeq> hyp_tokens, ref_tokens;
  std::vector<std::string> hyp_text, ref_text;
  double nll = 0.0;
  double source_mass = 0.0;

  for (const auto& pair : pairs) {
    TokenIds dec_in{bos};
    dec_in.insert(dec_in.end(), pair.tgt.begin(), pair.tgt.end());
    TokenIds gold = pair.tgt;
    gold.push_back(eos);

    const Mat probs = scorer.next_token_probs(pair.src, dec_in);
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const Vec row = probs.row(static_cast<Eigen::Index>(i)).transpose();
      nll -= std::log(row[gold[i]]);
      const Eigen::Index best = argmax_lowest(row);
      forced.push_back({row[best], best == gold[i]});
      double mass = 0.0;
      for (TokenId s : source_ids) mass += row[s];
      source_mass += mass;
    }

    const std::size_t max_len = std::min(pair.src.size() + decode_extra, max_positions - 1);
    const DecodeResult dec = greedy_decode(scorer, pair.src, max_len, bos, eos);
    const std::size_t aligned = std::min(dec.predictions.size(), gold.size());
    for (std::size_t i = 0; i < aligned; ++i) inferred.push_back({dec.confidences[i], dec.predictions[i] == gold[i]});

    hyp_tokens.push_back(to_tokens(corpus.joint, dec.tokens));
    ref_tokens.push_back(to_tokens(corpus.joint, pair.tgt));
    hyp_text.push_back(detokenize(hyp_tokens.back()));
    ref_text.push_back(detokenize(ref_tokens.back()));
  }

  EvalMetrics m;
  m.bins = bins;
  m.tokens = forced.size();
  m.ppl = perplexity(nll / static_cast<double>(forced.size()));
  m.mean_source_mass = source_mass / static_cast<double>(forced.size());
  m.teacher_forced_table = reliability_table(forced, bins);
  m.ece_teacher_forced = m.teacher_forced_table.ece;
  if (!inferred.empty()) {
    m.inference_table = reliability_table(inferred, bins);
    m.ece_inference = m.inference_table.ece;
  }
  m.bleu = bleu(hyp_tokens, ref_tokens);
  m.chrf = chrf(hyp_text, ref_text);
  return m;
}

}  // namespace lsmask::toynmt
