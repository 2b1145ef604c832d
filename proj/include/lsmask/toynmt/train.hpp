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
#include <vector>

#include "lsmask/smoothing.hpp"
#include "lsmask/toynmt/model.hpp"
#include "lsmask/toynmt/synthetic.hpp"

namespace lsmask::toynmt {

/// Adam with linear warmup then inverse-square-root decay. Full-scale
/// values: lr 7e-4, 1000 warmup steps from 1e-7, betas (0.9, 0.98), weight
/// decay 1e-4, 2048-token batches with update frequency 4.
struct TrainConfig {
  double lr = 3e-3;
  std::size_t warmup_steps = 200;
  double warmup_init_lr = 1e-7;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_eps = 1e-8;
  double weight_decay = 1e-4;
  /// Target tokens (EOS included) per update; sentences are added until the
  /// count is reached.
  std::size_t batch_tokens = 96;
  std::size_t max_steps = 1000;
  std::size_t eval_interval = 50;
  /// Training pairs scored for the train-perplexity curve.
  std::size_t train_eval_pairs = 200;
  std::uint64_t seed = 1;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Learning rate used for the update with 1-based index `step`.
double learning_rate(const TrainConfig& tc, std::size_t step);

struct Checkpoint {
  std::size_t step = 0;
  double train_loss = 0.0;  // mean soft CE of the updates since the previous checkpoint
  double train_ppl = 0.0;   // gold-token perplexity on the train-eval subset, no dropout
  double dev_ppl = 0.0;
};

struct TrainReport {
  SmoothingSpec smoothing;
  std::vector<Checkpoint> curve;
  std::size_t steps = 0;
  std::size_t target_positions = 0;
  /// Largest total target mass seen on source-only tokens over all built
  /// targets; exactly 0 for masked smoothing.
  double max_target_source_mass = 0.0;
  SmoothingDiagnostics diagnostics;
};

/// Teacher-forced gold-token perplexity of a scorer over pairs (EOS included).
double teacher_forced_perplexity(const SequenceScorer& scorer, const std::vector<SentencePair>& pairs,
                                 TokenId bos, TokenId eos);

/// Deterministic given (model init, tc.seed). Throws DivergedLoss(step) on a
/// non-finite loss and InvalidConfig / EmptyCorpus on bad inputs.
TrainReport train(Model& model, const ParallelCorpus& corpus, const SmoothingSpec& smoothing, const TrainConfig& tc);

}  // namespace lsmask::toynmt
