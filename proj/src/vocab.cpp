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

#include "lsmask/vocab.hpp"

#include <algorithm>

#include "lsmask/error.hpp"
#include "lsmask/io.hpp"

namespace lsmask {

std::vector<std::string> default_special_tokens() {
  return {std::string(kPadToken), std::string(kBosToken), std::string(kEosToken), std::string(kUnkToken)};
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw Error(Errc::EmptyVocabulary, "vocabulary has no tokens");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw Error(Errc::DuplicateToken, std::to_string(i + 1));
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw Error(Errc::IndexOutOfRange, "token id " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(std::string_view token) const {
  if (auto found = find(token)) return *found;
  throw Error(Errc::IndexOutOfRange, "token '" + std::string(token) + "' not in vocabulary");
}

Vocabulary load_vocab(std::string_view text) {
  std::vector<std::string> tokens;
  std::set<std::string_view> seen;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    if (!seen.insert(line).second) throw Error(Errc::DuplicateToken, std::to_string(line_no));
    tokens.emplace_back(line);
  }
  if (tokens.empty()) throw Error(Errc::EmptyVocabulary, "no tokens after removing blank lines");
  return Vocabulary(std::move(tokens));
}

Vocabulary load_vocab_file(const std::string& path) { return load_vocab(read_text_file(path)); }

std::string serialize_vocab(const Vocabulary& v) {
  std::string out;
  for (const auto& t : v.tokens()) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocabulary build_joint(const Vocabulary& src, const Vocabulary& tgt) {
  std::vector<std::string> tokens = src.tokens();
  for (const auto& t : tgt.tokens())
    if (!src.contains(t)) tokens.push_back(t);
  return Vocabulary(std::move(tokens));
}

std::string_view category_label(Category c) noexcept {
  switch (c) {
    case Category::SourceOnly: return "source";
    case Category::Common: return "common";
    case Category::TargetOnly: return "target";
  }
  return "?";
}

namespace {

void bump(CategoryCounts& counts, Category c) {
  switch (c) {
    case Category::SourceOnly: ++counts.source; break;
    case Category::Common: ++counts.common; break;
    case Category::TargetOnly: ++counts.target; break;
  }
}

}  // namespace

CategoryPartition::CategoryPartition(Vocabulary joint, std::vector<Category> category_by_id,
                                     std::set<TokenId> excluded_ids)
    : joint_(std::move(joint)), categories_(std::move(category_by_id)), excluded_(std::move(excluded_ids)) {
  if (categories_.size() != joint_.size())
    throw Error(Errc::LengthMismatch, "one category per joint token required");
  for (TokenId id : excluded_)
    if (id < 0 || static_cast<std::size_t>(id) >= joint_.size())
      throw Error(Errc::IndexOutOfRange, "excluded id " + std::to_string(id));
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    bump(counts_, categories_[i]);
    if (!excluded_.count(static_cast<TokenId>(i))) bump(active_counts_, categories_[i]);
  }
  if (active_counts_.common + active_counts_.target == 0)
    throw Error(Errc::NoLegalTargets, "partition has no usable common or target-only token");
}

std::vector<TokenId> CategoryPartition::ids_of(Category c) const {
  std::vector<TokenId> ids;
  for (std::size_t i = 0; i < categories_.size(); ++i)
    if (categories_[i] == c) ids.push_back(static_cast<TokenId>(i));
  return ids;
}

CategoryPartition partition(const Vocabulary& joint, const Vocabulary& src, const Vocabulary& tgt,
                            const std::set<std::string>& special, const std::set<std::string>& excluded) {
  std::vector<Category> cats;
  cats.reserve(joint.size());
  std::set<TokenId> excluded_ids;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const std::string& tok = joint.tokens()[i];
    const bool in_src = src.contains(tok);
    const bool in_tgt = tgt.contains(tok);
    if (special.count(tok) || (in_src && in_tgt)) {
      cats.push_back(Category::Common);
    } else if (in_src) {
      cats.push_back(Category::SourceOnly);
    } else if (in_tgt) {
      cats.push_back(Category::TargetOnly);
    } else {
      throw Error(Errc::OrphanToken, tok);
    }
    if (excluded.count(tok)) excluded_ids.insert(static_cast<TokenId>(i));
  }
  return CategoryPartition(joint, std::move(cats), std::move(excluded_ids));
}

CategoryStats stats(const CategoryPartition& p) {
  CategoryStats s;
  s.counts = p.counts();
  const double n = static_cast<double>(p.size());
  s.p_source = static_cast<double>(s.counts.source) / n;
  s.p_common = static_cast<double>(s.counts.common) / n;
  s.p_target = static_cast<double>(s.counts.target) / n;
  return s;
}

std::string serialize_partition(const CategoryPartition& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::string& tok = p.joint().tokens()[i];
    if (tok.find('\t') != std::string::npos)
      throw Error(Errc::MalformedRow, "token with a tab cannot be written as TSV: row " + std::to_string(i + 1));
    out += tok;
    out += '\t';
    out += category_label(p.categories()[i]);
    out += '\t';
    out += p.is_excluded(static_cast<TokenId>(i)) ? '1' : '0';
    out += '\n';
  }
  return out;
}

CategoryPartition parse_partition(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<Category> cats;
  std::set<TokenId> excluded;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty()) throw Error(Errc::MalformedRow, std::to_string(line_no));
    Category c;
    if (fields[1] == "source") c = Category::SourceOnly;
    else if (fields[1] == "common") c = Category::Common;
    else if (fields[1] == "target") c = Category::TargetOnly;
    else throw Error(Errc::UnknownCategory, std::to_string(line_no));
    if (fields[2] == "1") excluded.insert(static_cast<TokenId>(tokens.size()));
    else if (fields[2] != "0") throw Error(Errc::MalformedRow, std::to_string(line_no));
    tokens.emplace_back(fields[0]);
    cats.push_back(c);
  }
  if (tokens.empty()) throw Error(Errc::EmptyVocabulary, "partition has no rows");
  Vocabulary joint = [&] {
    try {
      return Vocabulary(std::move(tokens));
    } catch (const Error& e) {
      if (e.code() == Errc::DuplicateToken) throw Error(Errc::MalformedRow, e.detail());
      throw;
    }
  }();
  return CategoryPartition(std::move(joint), std::move(cats), std::move(excluded));
}

CategoryPartition load_partition_file(const std::string& path) { return parse_partition(read_text_file(path)); }

}  // namespace lsmask
