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

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lsmask/types.hpp"

namespace lsmask {

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

/// The four control tokens, in the order they are placed at the head of
/// generated vocabularies.
std::vector<std::string> default_special_tokens();

/// An ordered inventory of unique tokens. The id of a token is its index.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws DuplicateToken (1-based index of the repeat) or EmptyVocabulary.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  /// Throws IndexOutOfRange naming the token when absent.
  TokenId id(std::string_view token) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// One token per line; blank lines are skipped. Duplicate lines raise
/// DuplicateToken carrying the 1-based line number of the repeat.
Vocabulary load_vocab(std::string_view text);
Vocabulary load_vocab_file(const std::string& path);
std::string serialize_vocab(const Vocabulary& v);

/// All of src in order, then the tokens of tgt not already present.
Vocabulary build_joint(const Vocabulary& src, const Vocabulary& tgt);

enum class Category : std::uint8_t { SourceOnly = 0, Common = 1, TargetOnly = 2 };

std::string_view category_label(Category c) noexcept;  // "source" | "common" | "target"

struct CategoryCounts {
  std::size_t source = 0;
  std::size_t common = 0;
  std::size_t target = 0;

  std::size_t total() const noexcept { return source + common + target; }
  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

/// Disjoint source-only / common / target-only split of a joint vocabulary.
/// Excluded ids (padding) stay in their category but never receive smoothing
/// mass and do not count towards the smoothing denominators.
class CategoryPartition {
 public:
  CategoryPartition(Vocabulary joint, std::vector<Category> category_by_id, std::set<TokenId> excluded_ids);

  const Vocabulary& joint() const noexcept { return joint_; }
  std::size_t size() const noexcept { return joint_.size(); }
  Category category(TokenId id) const { return categories_.at(static_cast<std::size_t>(id)); }
  const std::vector<Category>& categories() const noexcept { return categories_; }
  bool is_excluded(TokenId id) const { return excluded_.count(id) != 0; }
  const std::set<TokenId>& excluded_ids() const noexcept { return excluded_; }

  /// Counts over every token, excluded ones included.
  const CategoryCounts& counts() const noexcept { return counts_; }
  /// Counts restricted to tokens that may receive smoothing mass.
  const CategoryCounts& active_counts() const noexcept { return active_counts_; }

  std::vector<TokenId> ids_of(Category c) const;

  friend bool operator==(const CategoryPartition& a, const CategoryPartition& b) {
    return a.joint_ == b.joint_ && a.categories_ == b.categories_ && a.excluded_ == b.excluded_;
  }

 private:
  Vocabulary joint_;
  std::vector<Category> categories_;
  std::set<TokenId> excluded_;
  CategoryCounts counts_;
  CategoryCounts active_counts_;
};

/// Classifies every joint token: in src and tgt -> Common, src only ->
/// SourceOnly, otherwise TargetOnly. Special tokens are Common regardless of
/// membership. Tokens of `excluded` (by default the padding token) present in
/// the joint vocabulary are marked excluded. Throws OrphanToken for a joint
/// token found in neither side and not special.
CategoryPartition partition(const Vocabulary& joint, const Vocabulary& src, const Vocabulary& tgt,
                            const std::set<std::string>& special,
                            const std::set<std::string>& excluded = {std::string(kPadToken)});

struct CategoryStats {
  CategoryCounts counts;
  double p_source = 0.0;
  double p_common = 0.0;
  double p_target = 0.0;
};

CategoryStats stats(const CategoryPartition& p);

/// TSV rows "token<TAB>category<TAB>excluded" in id order.
std::string serialize_partition(const CategoryPartition& p);
CategoryPartition parse_partition(std::string_view text);
CategoryPartition load_partition_file(const std::string& path);

}  // namespace lsmask
