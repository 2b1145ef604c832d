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
#include <optional>
#include <string>
#include <vector>

#include "lsmask/types.hpp"
#include "lsmask/vocab.hpp"

namespace lsmask::toynmt {

using TokenIds = std::vector<TokenId>;

struct SplitSizes {
  std::size_t train = 2000;
  std::size_t dev = 200;
  std::size_t test = 200;
};

/// Extra language pair concatenated onto the first one. It has its own
/// source-only inventory and shares the target side (common and target-only
/// tokens) with the first pair.
struct SecondPairSpec {
  std::size_t n_source_only = 10;
  double common_token_rate = 0.2;
  SplitSizes pairs{1000, 100, 100};
  std::uint64_t seed = 2;
};

struct SyntheticTaskSpec {
  std::size_t n_source_only = 10;
  std::size_t n_common = 4;
  std::size_t n_target_only = 10;
  std::size_t min_len = 3;
  std::size_t max_len = 8;
  SplitSizes pairs;
  /// Probability that a position carries a shared token copied to both sides.
  double common_token_rate = 0.2;
  std::optional<SecondPairSpec> second_pair;
  std::uint64_t seed = 1;

  /// Throws InvalidSpec.
  void validate() const;
};

struct SentencePair {
  TokenIds src;  // joint-vocabulary ids, no BOS/EOS
  TokenIds tgt;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct ParallelCorpus {
  std::vector<SentencePair> train;
  std::vector<SentencePair> dev;
  std::vector<SentencePair> test;
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
  Vocabulary joint;
  CategoryPartition partition;
  /// Joint id -> the target id the generator emits for it (common tokens map
  /// to themselves, tokens that never occur on the source side to -1). Empty
  /// for corpora read from disk.
  std::vector<TokenId> reference_map;

  TokenId pad_id() const { return joint.id(kPadToken); }
  TokenId bos_id() const { return joint.id(kBosToken); }
  TokenId eos_id() const { return joint.id(kEosToken); }
};

/// Source-only token i maps to a distinct target-only token through a seeded
/// random injection; each position is a shared token with probability
/// common_token_rate, else a source-only token and its image.
ParallelCorpus gen_synthetic(const SyntheticTaskSpec& spec);

/// Writes {train,dev,test}.{src,tgt}, {src,tgt,joint}.vocab and partition.tsv.
void write_corpus(const ParallelCorpus& corpus, const std::string& dir);
/// Reads what write_corpus wrote; throws Io / OrphanToken / MalformedRow.
ParallelCorpus read_corpus(const std::string& dir);

std::vector<std::string> to_tokens(const Vocabulary& v, const TokenIds& ids);
std::string detokenize_ids(const Vocabulary& v, const TokenIds& ids);

}  // namespace lsmask::toynmt
