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
#include <vector>

#include "lsmask/metrics.hpp"
#include "lsmask/toynmt/model.hpp"
#include "lsmask/toynmt/synthetic.hpp"

namespace lsmask::toynmt {

struct DecodeResult {
  TokenIds tokens;                 // emitted tokens, EOS excluded
  TokenIds predictions;            // argmax at every step, EOS step included
  std::vector<double> confidences; // probability of that argmax
  double max_row_sum_error = 0.0;  // max |sum(probs) - 1| over steps
};

/// Argmax decoding from BOS until EOS or max_len emitted tokens. Ties go to
/// the lowest token id.
DecodeResult greedy_decode(const SequenceScorer& scorer, const TokenIds& src, std::size_t max_len, TokenId bos,
                           TokenId eos);

struct EvalMetrics {
  double ppl = 0.0;
  double ece_teacher_forced = 0.0;
  double ece_inference = 0.0;
  double bleu = 0.0;
  double chrf = 0.0;
  /// Mean total predicted probability on source-only tokens per
  /// teacher-forced step.
  double mean_source_mass = 0.0;
  std::size_t tokens = 0;
  std::size_t bins = 0;
  CalibrationReport teacher_forced_table;
  CalibrationReport inference_table;
};

/// Teacher-forced perplexity, ECE and source mass plus greedy-decode ECE,
/// BLEU and chrF. Decoding length is capped at |src| + decode_extra and the
/// scorer's position limit. Throws EmptyCorpus.
EvalMetrics evaluate(const SequenceScorer& scorer, const std::vector<SentencePair>& pairs, const ParallelCorpus& corpus,
                     std::size_t bins = 10, std::size_t decode_extra = 4, std::size_t max_positions = 64);

}  // namespace lsmask::toynmt
