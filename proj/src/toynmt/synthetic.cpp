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

#include "lsmask/toynmt/synthetic.hpp"

#include <filesystem>

#include "lsmask/error.hpp"
#include "lsmask/io.hpp"
#include "lsmask/toynmt/random.hpp"

namespace lsmask::toynmt {

namespace {

void check_rate(double r, const char* what) {
  if (!(r >= 0.0 && r <= 1.0)) throw Error(Errc::InvalidSpec, std::string(what) + " must lie in [0, 1]");
}

void check_pair(std::size_t n_source_only, std::size_t n_common, std::size_t n_target_only, double rate,
                const char* what) {
  check_rate(rate, what);
  if (n_source_only > n_target_only)
    throw Error(Errc::InvalidSpec, std::string(what) + ": more source-only than target-only tokens");
  if (rate > 0.0 && n_common == 0)
    throw Error(Errc::InvalidSpec, std::string(what) + ": common_token_rate > 0 needs common tokens");
  if (rate < 1.0 && n_source_only == 0)
    throw Error(Errc::InvalidSpec, std::string(what) + ": common_token_rate < 1 needs source-only tokens");
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

struct PairGenerator {
  std::vector<TokenId> sources;  // joint ids of this pair's source-only tokens
  std::vector<TokenId> images;   // their target-only images, same order
  std::vector<TokenId> commons;
  std::size_t min_len;
  std::size_t max_len;
  double rate;

  std::vector<SentencePair> draw(Rng& rng, std::size_t count) const {
    std::vector<SentencePair> out;
    out.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
      const std::size_t len = min_len + rng.index(max_len - min_len + 1);
      SentencePair pair;
      for (std::size_t i = 0; i < len; ++i) {
        if (rng.uniform() < rate) {
          const TokenId c = commons[rng.index(commons.size())];
          pair.src.push_back(c);
          pair.tgt.push_back(c);
        } else {
          const std::size_t k = rng.index(sources.size());
          pair.src.push_back(sources[k]);
          pair.tgt.push_back(images[k]);
        }
      }
      out.push_back(std::move(pair));
    }
    return out;
  }
};

std::vector<TokenId> draw_images(Rng& rng, const Vocabulary& joint, std::size_t n_source_only,
                                 std::size_t n_target_only) {
  std::vector<std::size_t> perm(n_target_only);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.shuffle(perm.begin(), perm.end());
  std::vector<TokenId> images;
  for (std::size_t i = 0; i < n_source_only; ++i) images.push_back(joint.id("t" + std::to_string(perm[i])));
  return images;
}

void append(std::vector<SentencePair>& dst, std::vector<SentencePair> src) {
  dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

}  // namespace

void SyntheticTaskSpec::validate() const {
  if (n_target_only < 1) throw Error(Errc::InvalidSpec, "n_target_only must be >= 1");
  if (min_len < 1 || min_len > max_len) throw Error(Errc::InvalidSpec, "need 1 <= min_len <= max_len");
  if (pairs.train == 0) throw Error(Errc::InvalidSpec, "train split is empty");
  check_pair(n_source_only, n_common, n_target_only, common_token_rate, "common_token_rate");
  if (second_pair) {
    check_pair(second_pair->n_source_only, n_common, n_target_only, second_pair->common_token_rate,
               "second pair common_token_rate");
    if (second_pair->n_source_only == 0) throw Error(Errc::InvalidSpec, "second pair has no source-only tokens");
  }
}

ParallelCorpus gen_synthetic(const SyntheticTaskSpec& spec) {
  spec.validate();
  std::vector<std::string> src_tokens = default_special_tokens();
  std::vector<std::string> tgt_tokens = default_special_tokens();
  for (auto& c : numbered("c", spec.n_common)) {
    src_tokens.push_back(c);
    tgt_tokens.push_back(c);
  }
  for (auto& s : numbered("s", spec.n_source_only)) src_tokens.push_back(s);
  if (spec.second_pair)
    for (auto& u : numbered("u", spec.second_pair->n_source_only)) src_tokens.push_back(u);
  for (auto& t : numbered("t", spec.n_target_only)) tgt_tokens.push_back(t);

  Vocabulary src_vocab(std::move(src_tokens));
  Vocabulary tgt_vocab(std::move(tgt_tokens));
  Vocabulary joint = build_joint(src_vocab, tgt_vocab);
  const auto specials = default_special_tokens();
  CategoryPartition part = partition(joint, src_vocab, tgt_vocab, {specials.begin(), specials.end()});

  std::vector<TokenId> commons;
  for (auto& c : numbered("c", spec.n_common)) commons.push_back(joint.id(c));

  std::vector<TokenId> reference_map(joint.size(), -1);
  for (TokenId c : commons) reference_map[static_cast<std::size_t>(c)] = c;

  std::vector<SentencePair> train, dev, test;
  const auto run_pair = [&](const std::string& prefix, std::size_t n_src, double rate, const SplitSizes& sizes,
                            std::uint64_t seed) {
    Rng rng(seed);
    PairGenerator gen;
    for (auto& s : numbered(prefix, n_src)) gen.sources.push_back(joint.id(s));
    gen.images = draw_images(rng, joint, n_src, spec.n_target_only);
    gen.commons = commons;
    gen.min_len = spec.min_len;
    gen.max_len = spec.max_len;
    gen.rate = rate;
    for (std::size_t i = 0; i < gen.sources.size(); ++i)
      reference_map[static_cast<std::size_t>(gen.sources[i])] = gen.images[i];
    append(train, gen.draw(rng, sizes.train));
    append(dev, gen.draw(rng, sizes.dev));
    append(test, gen.draw(rng, sizes.test));
  };
  run_pair("s", spec.n_source_only, spec.common_token_rate, spec.pairs, spec.seed);
  if (spec.second_pair) {
    const auto& sp = *spec.second_pair;
    run_pair("u", sp.n_source_only, sp.common_token_rate, sp.pairs, sp.seed);
  }

  return ParallelCorpus{std::move(train), std::move(dev), std::move(test), std::move(src_vocab),
                        std::move(tgt_vocab), std::move(joint), std::move(part), std::move(reference_map)};
}

std::vector<std::string> to_tokens(const Vocabulary& v, const TokenIds& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(v.token(id));
  return out;
}

namespace {

std::string side_text(const Vocabulary& joint, const std::vector<SentencePair>& pairs, bool source) {
  std::string out;
  for (const auto& p : pairs) {
    out += detokenize_ids(joint, source ? p.src : p.tgt);
    out += '\n';
  }
  return out;
}

std::vector<SentencePair> read_split(const Vocabulary& joint, const std::string& dir, const std::string& name) {
  const std::string src_path = dir + "/" + name + ".src";
  const std::string tgt_path = dir + "/" + name + ".tgt";
  const auto src_text = read_text_file(src_path);
  const auto tgt_text = read_text_file(tgt_path);
  const auto src_lines = split_lines(src_text);
  const auto tgt_lines = split_lines(tgt_text);
  if (src_lines.size() != tgt_lines.size())
    throw Error(Errc::MalformedRow, src_path + " and " + tgt_path + " have different line counts");
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    SentencePair p;
    for (const auto& t : split_whitespace(src_lines[i])) {
      const auto id = joint.find(t);
      if (!id) throw Error(Errc::OrphanToken, t + " (" + src_path + ":" + std::to_string(i + 1) + ")");
      p.src.push_back(*id);
    }
    for (const auto& t : split_whitespace(tgt_lines[i])) {
      const auto id = joint.find(t);
      if (!id) throw Error(Errc::OrphanToken, t + " (" + tgt_path + ":" + std::to_string(i + 1) + ")");
      p.tgt.push_back(*id);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string detokenize_ids(const Vocabulary& v, const TokenIds& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += v.token(ids[i]);
  }
  return out;
}

void write_corpus(const ParallelCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/src.vocab", serialize_vocab(corpus.src_vocab));
  write_text_file(dir + "/tgt.vocab", serialize_vocab(corpus.tgt_vocab));
  write_text_file(dir + "/joint.vocab", serialize_vocab(corpus.joint));
  write_text_file(dir + "/partition.tsv", serialize_partition(corpus.partition));
  const std::pair<const char*, const std::vector<SentencePair>*> splits[] = {
      {"train", &corpus.train}, {"dev", &corpus.dev}, {"test", &corpus.test}};
  for (const auto& [name, pairs] : splits) {
    write_text_file(dir + "/" + name + ".src", side_text(corpus.joint, *pairs, true));
    write_text_file(dir + "/" + name + ".tgt", side_text(corpus.joint, *pairs, false));
  }
}

ParallelCorpus read_corpus(const std::string& dir) {
  Vocabulary src_vocab = load_vocab_file(dir + "/src.vocab");
  Vocabulary tgt_vocab = load_vocab_file(dir + "/tgt.vocab");
  Vocabulary joint = load_vocab_file(dir + "/joint.vocab");
  CategoryPartition part = load_partition_file(dir + "/partition.tsv");
  if (!(part.joint() == joint)) throw Error(Errc::MalformedRow, dir + "/partition.tsv does not match joint.vocab");
  auto train = read_split(joint, dir, "train");
  auto dev = read_split(joint, dir, "dev");
  auto test = read_split(joint, dir, "test");
  return ParallelCorpus{std::move(train), std::move(dev), std::move(test), std::move(src_vocab),
                        std::move(tgt_vocab), std::move(joint), std::move(part), {}};
}

}  // namespace lsmask::toynmt
