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
#include <string>
#include <string_view>
#include <vector>

#include "lsmask/types.hpp"
#include "lsmask/vocab.hpp"

namespace lsmask {

enum class SmoothingMode { OneHot, UniformLS, WeightedLS, MaskedLS };

std::string_view mode_name(SmoothingMode m) noexcept;  // onehot | uniform | weighted | masked
SmoothingMode parse_mode(std::string_view name);       // throws InvalidConfig

/// Share of the smoothing mass given to each category. Shares are class-sum
/// ratios: every non-excluded token of a class gets an equal part of its share.
struct Betas {
  double target = 1.0 / 3.0;
  double common = 1.0 / 3.0;
  double source = 1.0 / 3.0;

  double of(Category c) const noexcept;
  friend bool operator==(const Betas&, const Betas&) = default;
};

/// Throws InvalidBetas unless all shares are finite, non-negative and sum to 1
/// within 1e-12.
void validate_betas(const Betas& b);
/// Parses "t,c,s"; each share is a decimal or a fraction "a/b". Throws
/// InvalidBetas.
Betas parse_betas(std::string_view text);

struct SmoothingSpec {
  SmoothingMode mode = SmoothingMode::UniformLS;
  double alpha = 0.1;
  Betas betas;

  /// Throws AlphaOutOfRange / InvalidBetas.
  void validate() const;
  /// Short file-name-safe label, e.g. "ls", "mls", "wls-0.5-0.5-0".
  std::string label() const;

  friend bool operator==(const SmoothingSpec&, const SmoothingSpec&) = default;
};

/// Dense target distribution for one position.
struct LabelDistribution {
  Vec probs;
  TokenId correct_id = 0;
  double alpha = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(probs.size()); }
};

/// Counts gold tokens that fall in the source-only class. Such tokens still
/// get 1 - alpha, but no masked smoothing share.
struct SmoothingDiagnostics {
  std::size_t source_only_gold = 0;
};

LabelDistribution one_hot(std::size_t vocab_size, TokenId correct_id);

/// (1 - alpha) on the gold token plus alpha / K on every token.
LabelDistribution smooth_uniform(std::size_t vocab_size, TokenId correct_id, double alpha);

/// Uniform smoothing restricted to non-excluded tokens of the partition;
/// identical to the plain form when nothing is excluded.
LabelDistribution smooth_uniform(const CategoryPartition& p, TokenId correct_id, double alpha);

/// Each non-excluded token of class X gets alpha * beta_X / |X|. The gold token
/// takes part in its own class share and additionally receives 1 - alpha.
LabelDistribution smooth_weighted(const CategoryPartition& p, TokenId correct_id, double alpha, const Betas& betas);

/// Target and common tokens form one uniform pool of size |T u C|; source-only
/// and excluded tokens get exactly 0.
LabelDistribution smooth_masked(const CategoryPartition& p, TokenId correct_id, double alpha,
                                SmoothingDiagnostics* diag = nullptr);

/// Shares that make smooth_weighted reproduce smooth_masked:
/// (|T| / |T u C|, |C| / |T u C|, 0) over non-excluded counts.
Betas mls_as_wls_betas(const CategoryPartition& p);

/// Dispatches on spec.mode. UniformLS uses the partition-aware form.
LabelDistribution build_target(const SmoothingSpec& spec, const CategoryPartition& p, TokenId correct_id,
                               SmoothingDiagnostics* diag = nullptr);

enum class Violation { CorrectIdOutOfRange, NegativeEntry, NonFiniteEntry, SumNotOne, GoldBelowFloor };
std::string_view violation_name(Violation v) noexcept;

/// Empty iff entries are finite and non-negative, sum to 1 within 1e-9, and
/// the gold entry is at least 1 - alpha.
std::vector<Violation> validate(const LabelDistribution& d);

/// Line-oriented record: K, alpha, mode, betas, correct_id, probs; numbers
/// printed with 17 significant digits.
std::string dump_distribution(const SmoothingSpec& spec, const LabelDistribution& d);

struct DistributionRecord {
  SmoothingSpec spec;
  LabelDistribution dist;
};
/// Inverse of dump_distribution; throws MalformedRow with the offending line.
DistributionRecord parse_distribution(std::string_view text);

}  // namespace lsmask
