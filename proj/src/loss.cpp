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

#include "lsmask/loss.hpp"

namespace lsmask {

SequenceLoss sequence_loss(const std::vector<LabelDistribution>& targets, const std::vector<Vec>& logits,
                           const std::vector<bool>& pad_mask) {
  if (targets.size() != logits.size() || targets.size() != pad_mask.size())
    throw Error(Errc::LengthMismatch, "targets, logits and pad mask must have equal length");
  SequenceLoss out;
  double ce_sum = 0.0;
  double nll_sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (pad_mask[i]) continue;
    const PositionLoss l = cross_entropy(targets[i], logits[i]);
    ce_sum += l.soft_ce;
    nll_sum += l.gold_nll;
    ++out.token_count;
  }
  if (out.token_count == 0) throw Error(Errc::AllPadded, "every position is padding");
  out.mean_soft_ce = ce_sum / static_cast<double>(out.token_count);
  out.mean_gold_nll = nll_sum / static_cast<double>(out.token_count);
  return out;
}

double perplexity(double mean_gold_nll) {
  if (!(mean_gold_nll >= 0.0)) throw Error(Errc::NegativeInput, "mean gold NLL must be >= 0");
  return std::exp(mean_gold_nll);
}

double entropy(const Vec& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i)
    if (probs[i] > 0.0) h -= probs[i] * std::log(probs[i]);
  return h;
}

}  // namespace lsmask
