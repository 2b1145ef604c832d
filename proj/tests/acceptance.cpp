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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "lsmask/cli.hpp"
#include "lsmask/io.hpp"
#include "lsmask/loss.hpp"
#include "lsmask/metrics.hpp"
#include "lsmask/smoothing.hpp"
#include "lsmask/toynmt/config.hpp"
#include "lsmask/toynmt/experiment.hpp"
#include "oracles.hpp"

using namespace lsmask;
using namespace lsmask::toynmt;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

TokenId random_gold(Rng& rng, const CategoryPartition& p) {
  TokenId g;
  do g = static_cast<TokenId>(rng.index(p.size()));
  while (p.is_excluded(g));
  return g;
}

// Shared random instances for criteria 2 and 3.
struct Instance {
  CategoryPartition partition;
  TokenId gold;
  double alpha;
  Betas betas;
};

std::vector<Instance> random_instances(std::size_t n) {
  Rng rng(2024);
  std::vector<Instance> out;
  for (std::size_t i = 0; i < n; ++i) {
    CategoryPartition p = oracle::random_partition(rng, 64);
    const TokenId gold = random_gold(rng, p);
    const double alpha = rng.uniform() * 0.99;
    const Betas b = oracle::random_betas(rng, p.active_counts());
    out.push_back({std::move(p), gold, alpha, b});
  }
  return out;
}

void partition_oracle() {
  Rng rng(99);
  const auto start = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  const auto sv = default_special_tokens();
  const std::set<std::string> specials(sv.begin(), sv.end());
  for (int trial = 0; trial < 200; ++trial) {
    const oracle::VocabTriple t = oracle::random_triple(rng);
    const CategoryPartition p = partition(Vocabulary(t.joint), Vocabulary(t.src), Vocabulary(t.tgt), specials);
    if (p.categories() != oracle::brute_partition(t.joint, t.src, t.tgt, sv)) ++mismatches;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(1, "partition oracle", mismatches == 0 && secs < 5.0,
         "200 triples, " + std::to_string(mismatches) + " mismatches, " + fmt(secs) + " s");
}

void distribution_exactness(const std::vector<Instance>& inst) {
  std::size_t bad = 0;
  double worst_sum = 0.0, worst_class = 0.0;
  for (const auto& x : inst) {
    const auto& p = x.partition;
    const std::vector<LabelDistribution> all{one_hot(p.size(), x.gold), smooth_uniform(p, x.gold, x.alpha),
                                             smooth_weighted(p, x.gold, x.alpha, x.betas),
                                             smooth_masked(p, x.gold, x.alpha)};
    for (const auto& d : all) {
      if ((d.probs.array() < 0.0).any()) ++bad;
      worst_sum = std::max(worst_sum, std::fabs(d.probs.sum() - 1.0));
    }
    const Vec& w = all[2].probs;
    double sums[3] = {0, 0, 0};
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double v = w[static_cast<Eigen::Index>(i)] - (static_cast<TokenId>(i) == x.gold ? 1.0 - x.alpha : 0.0);
      sums[static_cast<int>(p.category(static_cast<TokenId>(i)))] += v;
    }
    worst_class = std::max({worst_class, std::fabs(sums[0] - x.alpha * x.betas.source),
                            std::fabs(sums[1] - x.alpha * x.betas.common),
                            std::fabs(sums[2] - x.alpha * x.betas.target)});
    const Vec& m = all[3].probs;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto id = static_cast<TokenId>(i);
      if (id != x.gold && p.category(id) == Category::SourceOnly && m[id] != 0.0) ++bad;
    }
  }
  report(2, "distribution exactness", bad == 0 && worst_sum <= 1e-9 && worst_class <= 1e-12,
         std::to_string(inst.size()) + " instances, max |sum-1| " + fmt(worst_sum) + ", max class-sum error " +
             fmt(worst_class) + ", " + std::to_string(bad) + " negative or masked-leak entries");
}

void mls_wls_equivalence(const std::vector<Instance>& inst) {
  double worst = 0.0;
  std::size_t unequal_sizes = 0, distinct = 0;
  for (const auto& x : inst) {
    const auto& p = x.partition;
    const Vec m = smooth_masked(p, x.gold, x.alpha).probs;
    worst = std::max(worst, (smooth_weighted(p, x.gold, x.alpha, mls_as_wls_betas(p)).probs - m).cwiseAbs().maxCoeff());
    const CategoryCounts& n = p.active_counts();
    if (n.target != n.common && n.target > 0 && n.common > 0 && x.alpha > 0.0) {
      ++unequal_sizes;
      const Vec half = smooth_weighted(p, x.gold, x.alpha, Betas{0.5, 0.5, 0.0}).probs;
      if ((half - m).cwiseAbs().maxCoeff() > 0.0) ++distinct;
    }
  }
  report(3, "MLS/WLS equivalence", worst <= 1e-15 && distinct == unequal_sizes,
         "max entry difference " + fmt(worst) + "; differs from 1/2-1/2-0 in " + std::to_string(distinct) + " of " +
             std::to_string(unequal_sizes) + " instances with |T| != |C|");
}

void ten_token_fixture() {
  std::vector<std::string> tokens;
  std::vector<Category> cats;
  for (int i = 0; i < 10; ++i) {
    tokens.push_back("w" + std::to_string(i));
    cats.push_back(i < 4 ? Category::TargetOnly : i < 7 ? Category::Common : Category::SourceOnly);
  }
  const CategoryPartition p(Vocabulary(tokens), cats, {});
  const Vec m = smooth_masked(p, 0, 0.1).probs;
  const Vec w = smooth_weighted(p, 0, 0.1, Betas{}).probs;
  double err = std::fabs(m[0] - (0.9 + 0.1 / 7.0));
  for (int i = 1; i < 7; ++i) err = std::max(err, std::fabs(m[i] - 0.1 / 7.0));
  for (int i = 7; i < 10; ++i) err = std::max(err, std::fabs(m[i]));
  err = std::max(err, std::fabs(w[0] - (0.9 + 0.1 / 12.0)));
  for (int i = 1; i < 4; ++i) err = std::max(err, std::fabs(w[i] - 0.1 / 12.0));
  for (int i = 4; i < 10; ++i) err = std::max(err, std::fabs(w[i] - 0.1 / 9.0));
  report(4, "ten-token fixture", err <= 1e-12,
         "MLS gold " + fmt(m[0]) + " pool " + fmt(m[1]) + "; WLS gold " + fmt(w[0]) + " target " + fmt(w[1]) +
             " common/source " + fmt(w[4]) + "; max error " + fmt(err));
}

double micro_model_gradient_error() {
  ModelConfig mc;
  mc.layers = 1;
  mc.model_dim = 8;
  mc.heads = 1;
  mc.ffn_dim = 16;
  mc.max_positions = 8;
  mc.dropout = 0.1;
  const std::size_t k = 12;
  Model model = init_model(mc, k);
  std::vector<std::string> toks;
  std::vector<Category> cats;
  for (std::size_t i = 0; i < k; ++i) {
    toks.push_back("w" + std::to_string(i));
    cats.push_back(i < 4 ? Category::Common : i < 8 ? Category::SourceOnly : Category::TargetOnly);
  }
  const CategoryPartition part(Vocabulary(toks), cats, {0});
  const TokenIds src{4, 5, 6, 7}, dec{1, 8, 9, 10};
  std::vector<LabelDistribution> targets;
  for (TokenId g : {8, 9, 10, 2}) targets.push_back(smooth_masked(part, g, 0.1));
  const DropoutKey key{5, 2, 0};
  const auto loss = [&]() {
    const Mat z = model.logits(src, dec, &key);
    double total = 0.0;
    for (Eigen::Index r = 0; r < z.rows(); ++r)
      total += static_cast<double>(oracle::soft_ce_ld(targets[static_cast<std::size_t>(r)].probs, z.row(r).transpose()));
    return total;
  };
  Parameters grads = zeros_like(model.params());
  model.forward_backward(src, dec, &key,
                         [&](const Mat& z) {
                           Mat g(z.rows(), z.cols());
                           for (Eigen::Index r = 0; r < z.rows(); ++r)
                             g.row(r) = grad_logits(targets[static_cast<std::size_t>(r)], z.row(r).transpose());
                           return g;
                         },
                         grads);
  const Vec analytic = flatten(grads);
  const Vec base = flatten(model.params());
  Rng rng(31);
  const std::size_t samples = (static_cast<std::size_t>(base.size()) + 99) / 100;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto i = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(base.size())));
    Vec x = base;
    x[i] += 1e-5;
    unflatten(x, model.params());
    const double up = loss();
    x[i] -= 2e-5;
    unflatten(x, model.params());
    const double down = loss();
    unflatten(base, model.params());
    const double fd = (up - down) / 2e-5;
    worst = std::max(worst, std::fabs(fd - analytic[i]) / std::max({std::fabs(fd), std::fabs(analytic[i]), 1e-6}));
  }
  return worst;
}

void gradient_checks() {
  Rng rng(77);
  const SmoothingMode modes[] = {SmoothingMode::OneHot, SmoothingMode::UniformLS, SmoothingMode::WeightedLS,
                                 SmoothingMode::MaskedLS};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const CategoryPartition p = oracle::random_partition(rng, 32);
    const SmoothingSpec spec{modes[trial % 4], 0.05 + rng.uniform() * 0.4, oracle::random_betas(rng, p.active_counts())};
    const LabelDistribution t = build_target(spec, p, random_gold(rng, p));
    Vec z(static_cast<Eigen::Index>(p.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = (rng.uniform() * 2.0 - 1.0) * 4.0;
    const Vec fd = oracle::central_difference(
        [&](const Vec& v) { return static_cast<double>(oracle::soft_ce_ld(t.probs, v)); }, z, 1e-5);
    const Vec g = grad_logits(t, z);
    for (Eigen::Index i = 0; i < z.size(); ++i)
      worst = std::max(worst, std::fabs(g[i] - fd[i]) / std::max({std::fabs(g[i]), std::fabs(fd[i]), 1e-8}));
  }
  const double micro = micro_model_gradient_error();
  report(5, "gradient checks", worst <= 1e-5 && micro <= 1e-3,
         "logit gradient max relative error " + fmt(worst) + " over 100 instances; micro model " + fmt(micro) +
             " on 1% of parameters");
}

void ece_oracle() {
  const double hand = ece({{0.9, true}, {0.8, false}, {0.3, false}, {0.2, true}}, 2).ece;
  Rng rng(55);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PredictionSample> s(1 + rng.index(500));
    for (auto& x : s) {
      x.confidence = rng.uniform();
      x.correct = rng.uniform() < 0.7;
    }
    const std::size_t m = std::vector<std::size_t>{5, 10, 20}[static_cast<std::size_t>(trial % 3)];
    worst = std::max(worst, std::fabs(ece(s, m).ece - oracle::brute_ece(s, m)));
  }
  double calibrated = 0.0;
  for (std::size_t m : {5u, 10u, 20u}) {
    // Confidences k/8 are exact in binary; each level has 8 samples, k correct.
    std::vector<PredictionSample> s;
    for (std::size_t k = 0; k <= 8; ++k)
      for (std::size_t j = 0; j < 8; ++j) s.push_back({static_cast<double>(k) / 8.0, j < k});
    calibrated = std::max(calibrated, ece(s, m).ece);
    calibrated = std::max(calibrated, ece(std::vector<PredictionSample>(7, {1.0, true}), m).ece);
  }
  char hand_text[64];
  std::snprintf(hand_text, sizeof hand_text, "%.17g", hand);
  report(6, "ECE oracle", std::fabs(hand - 0.3) <= std::nextafter(0.3, 1.0) - 0.3 && worst <= 1e-12 && calibrated == 0.0,
         std::string("hand case ") + hand_text + " (0.3 to one ulp), max brute-force difference " + fmt(worst) +
             ", calibrated sets " + fmt(calibrated));
}

void metric_oracles() {
  const std::vector<std::string> hyps = {
      "the cat sat on the mat", "a quick brown fox jumps over the dog", "the the the the",
      "we love machine translation models", "über die brücke gehen wir", "label smoothing helps the model",
      "it is a nice day today", "source tokens get no mass", "shared vocabulary for both sides", "x y z"};
  const std::vector<std::string> refs = {
      "the cat is sitting on the mat", "the quick brown fox jumps over the lazy dog", "the cat ate the fish",
      "we love neural machine translation", "wir gehen über die brücke", "label smoothing helps the model generalize",
      "today is a nice day", "source only tokens receive zero mass", "a shared vocabulary for both languages",
      "x y z w"};
  // sacrebleu 2.6.0 corpus scores / 100: BLEU(tokenize="none",
  // smooth_method="none") and CHRF(char_order=6, word_order=0, beta=2).
  const double ref_bleu = 0.45124169115282087;
  const double ref_chrf = 0.6318611733705125;
  std::vector<TokenSeq> ht, rt;
  for (const auto& h : hyps) ht.push_back(split_whitespace(h));
  for (const auto& r : refs) rt.push_back(split_whitespace(r));
  const double b = bleu(ht, rt);
  const double c = chrf(hyps, refs);
  const double bi = bleu(rt, rt);
  const double ci = chrf(refs, refs);
  report(7, "metric oracles",
         std::fabs(b - ref_bleu) <= 1e-6 && std::fabs(c - ref_chrf) <= 1e-6 && std::fabs(bi - 1.0) <= 1e-12 &&
             std::fabs(ci - 1.0) <= 1e-12,
         "BLEU " + fmt(b) + " (reference " + fmt(ref_bleu) + "), chrF " + fmt(c) + " (reference " + fmt(ref_chrf) +
             "), identical corpora " + fmt(bi) + "/" + fmt(ci));
}

struct TimedRun {
  RunRecord record;
  double cpu_seconds;
};

TimedRun timed_run(const ParallelCorpus& corpus, const RunConfig& cfg, const SmoothingSpec& spec, std::uint64_t seed) {
  const std::clock_t start = std::clock();
  RunRecord r = run_single(corpus, cfg.model, cfg.train, spec, seed, cfg.eval);
  const double secs = static_cast<double>(std::clock() - start) / CLOCKS_PER_SEC;
  std::printf("   run %-10s seed %llu: dev bleu %.4f, ppl %.4f, inference ece %.4f, source mass %.3g (%.1f s)\n",
              spec.label().c_str(), static_cast<unsigned long long>(seed), r.dev.bleu, r.dev.ppl, r.dev.ece_inference,
              r.dev.mean_source_mass, secs);
  std::fflush(stdout);
  return {std::move(r), secs};
}

int run_cli_quiet(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::vector<std::string> full{"lsmask"};
  full.insert(full.end(), args.begin(), args.end());
  const int code = run_cli(full, out, err);
  if (code != kExitOk) std::printf("   cli error: %s", err.str().c_str());
  return code;
}

bool same_files(const std::string& a, const std::string& b, std::size_t& compared) {
  bool same = true;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), a).string();
    const fs::path other = fs::path(b) / rel;
    ++compared;
    if (!fs::exists(other) || read_text_file(entry.path().string()) != read_text_file(other.string())) {
      std::printf("   differs: %s\n", rel.c_str());
      same = false;
    }
  }
  return same;
}

void determinism() {
  const std::string a = oracle::scratch_dir("determinism_a");
  const std::string b = oracle::scratch_dir("determinism_b");
  RunConfig cfg;
  cfg.out_dir = a;
  write_text_file(a + ".json", dump_config(cfg));
  bool ok = run_cli_quiet({"gen", "--config", a + ".json"}) == kExitOk &&
            run_cli_quiet({"train", "--config", a + ".json"}) == kExitOk &&
            run_cli_quiet({"eval", "--run", a}) == kExitOk;
  ok = ok && run_cli_quiet({"gen", "--config", a + "/config.resolved.json", "--out", b}) == kExitOk &&
       run_cli_quiet({"train", "--config", a + "/config.resolved.json", "--out", b}) == kExitOk &&
       run_cli_quiet({"eval", "--run", b}) == kExitOk;
  std::size_t compared = 0;
  // The archived configs differ only in out_dir.
  fs::remove(a + "/config.resolved.json");
  fs::remove(b + "/config.resolved.json");
  ok = ok && same_files(a, b, compared);
  report(12, "determinism", ok && compared > 0,
         "re-ran gen, train and eval from the archived config; " + std::to_string(compared) +
             " files compared byte for byte");
}

}  // namespace

int main() {
  partition_oracle();
  const std::vector<Instance> inst = random_instances(500);
  distribution_exactness(inst);
  mls_wls_equivalence(inst);
  ten_token_fixture();
  gradient_checks();
  ece_oracle();
  metric_oracles();

  const RunConfig cfg;
  const ParallelCorpus corpus = gen_synthetic(cfg.task);
  const SmoothingSpec ls{SmoothingMode::UniformLS, 0.1, {}};
  const SmoothingSpec mls{SmoothingMode::MaskedLS, 0.1, {}};
  std::vector<TimedRun> ls_runs, mls_runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ls_runs.push_back(timed_run(corpus, cfg, ls, seed));
    mls_runs.push_back(timed_run(corpus, cfg, mls, seed));
  }
  const TimedRun onehot = timed_run(corpus, cfg, SmoothingSpec{SmoothingMode::OneHot, 0.1, {}}, 1);
  const TimedRun wls = timed_run(corpus, cfg, SmoothingSpec{SmoothingMode::WeightedLS, 0.1, {}}, 1);

  {
    bool ok = true;
    std::string detail;
    for (const TimedRun* r : std::vector<const TimedRun*>{&onehot, &ls_runs[0], &wls, &mls_runs[0]}) {
      ok = ok && r->record.dev.bleu >= 0.9 && r->cpu_seconds <= 300.0;
      detail += r->record.smoothing.label() + " " + fmt(r->record.dev.bleu) + " in " + fmt(r->cpu_seconds) + " s; ";
    }
    report(8, "learnability", ok, "dev BLEU at " + std::to_string(cfg.train.max_steps) + " steps: " + detail);
  }
  {
    int wins = 0;
    std::string detail;
    const std::size_t early = cfg.train.max_steps / 4;
    for (std::size_t s = 0; s < 5; ++s) {
      std::size_t checked = 0, lower = 0;
      const auto& a = mls_runs[s].record.train.curve;
      const auto& b = ls_runs[s].record.train.curve;
      for (std::size_t i = 0; i < a.size() && a[i].step <= early; ++i, ++checked)
        lower += a[i].train_ppl <= b[i].train_ppl ? 1 : 0;
      wins += (checked > 0 && lower == checked) ? 1 : 0;
      detail += (s ? ", " : "") + std::to_string(lower) + "/" + std::to_string(checked);
    }
    report(9, "early perplexity direction", wins >= 4,
           "MLS <= LS train perplexity at every checkpoint up to step " + std::to_string(early) + " in " +
               std::to_string(wins) + "/5 seeds (checkpoints with MLS <= LS per seed: " + detail + ")");
  }
  {
    int wins = 0;
    double max_mass = 0.0;
    std::string detail;
    for (std::size_t s = 0; s < 5; ++s) {
      const double m = mls_runs[s].record.dev.mean_source_mass;
      const double l = ls_runs[s].record.dev.mean_source_mass;
      wins += m < l ? 1 : 0;
      max_mass = std::max(max_mass, mls_runs[s].record.train.max_target_source_mass);
      detail += fmt(m) + " vs " + fmt(l) + "; ";
    }
    report(10, "source-mass direction", wins >= 4 && max_mass == 0.0,
           "MLS lower in " + std::to_string(wins) + "/5 seeds (" + detail + "max MLS target source mass " +
               fmt(max_mass) + ")");
  }
  {
    int wins = 0;
    std::string detail;
    for (std::size_t s = 0; s < 5; ++s) {
      const double d = mls_runs[s].record.dev.ece_inference - ls_runs[s].record.dev.ece_inference;
      wins += d <= 0.0 ? 1 : 0;
      detail += (s ? ", " : "") + fmt(d);
    }
    report(11, "calibration direction", wins >= 3,
           "MLS inference ECE <= LS in " + std::to_string(wins) + "/5 seeds, deltas MLS-LS: " + detail);
  }
  determinism();

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
