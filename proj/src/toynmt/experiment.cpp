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

#include "lsmask/toynmt/experiment.hpp"

#include <algorithm>

#include "lsmask/error.hpp"

namespace lsmask::toynmt {

RunRecord run_single(const ParallelCorpus& corpus, const ModelConfig& mc, const TrainConfig& tc,
                     const SmoothingSpec& smoothing, std::uint64_t seed, const EvalOptions& eval, Model* trained) {
  ModelConfig model_cfg = mc;
  model_cfg.init_seed = seed;
  TrainConfig train_cfg = tc;
  train_cfg.seed = seed;

  Model model = init_model(model_cfg, corpus.joint.size());
  RunRecord rec;
  rec.smoothing = smoothing;
  rec.seed = seed;
  rec.train = train(model, corpus, smoothing, train_cfg);
  rec.dev = evaluate(model, corpus.dev.empty() ? corpus.train : corpus.dev, corpus, eval.bins, eval.decode_extra,
                     model_cfg.max_positions);
  if (trained) *trained = std::move(model);
  return rec;
}

namespace {

EvalMetrics combine(const EvalMetrics& a, const EvalMetrics& b, double wa, double wb) {
  EvalMetrics m = a;
  m.ppl = wa * a.ppl + wb * b.ppl;
  m.ece_teacher_forced = wa * a.ece_teacher_forced + wb * b.ece_teacher_forced;
  m.ece_inference = wa * a.ece_inference + wb * b.ece_inference;
  m.bleu = wa * a.bleu + wb * b.bleu;
  m.chrf = wa * a.chrf + wb * b.chrf;
  m.mean_source_mass = wa * a.mean_source_mass + wb * b.mean_source_mass;
  return m;
}

}  // namespace

ExperimentReport compare(const ParallelCorpus& corpus, const ModelConfig& mc, const TrainConfig& tc,
                         const std::vector<SmoothingSpec>& specs, const std::vector<std::uint64_t>& seeds,
                         const EvalOptions& eval) {
  if (specs.empty()) throw Error(Errc::InvalidConfig, "compare needs at least one smoothing spec");
  if (seeds.empty()) throw Error(Errc::InvalidConfig, "compare needs at least one seed");
  ExperimentReport report;
  for (const auto& spec : specs)
    for (std::uint64_t seed : seeds) report.runs.push_back(run_single(corpus, mc, tc, spec, seed, eval));

  for (std::size_t s = 0; s < specs.size(); ++s) {
    SpecSummary sum;
    sum.smoothing = specs[s];
    sum.seeds = seeds.size();
    const double w = 1.0 / static_cast<double>(seeds.size());
    const EvalMetrics& first = report.runs[s * seeds.size()].dev;
    sum.mean = combine(first, first, 0.0, 0.0);
    for (std::size_t k = 0; k < seeds.size(); ++k) sum.mean = combine(sum.mean, report.runs[s * seeds.size() + k].dev, 1.0, w);
    report.summary.push_back(sum);
  }
  const auto baseline = std::find_if(report.summary.begin(), report.summary.end(), [](const SpecSummary& s) {
    return s.smoothing.mode == SmoothingMode::UniformLS;
  });
  if (baseline != report.summary.end()) {
    const EvalMetrics base = baseline->mean;
    for (auto& s : report.summary) s.delta_vs_ls = combine(s.mean, base, 1.0, -1.0);
  }
  return report;
}

nlohmann::ordered_json to_json(const SmoothingSpec& s) {
  nlohmann::ordered_json j;
  j["label"] = s.label();
  j["mode"] = std::string(mode_name(s.mode));
  j["alpha"] = s.alpha;
  j["betas"] = {s.betas.target, s.betas.common, s.betas.source};
  return j;
}

nlohmann::ordered_json to_json(const EvalMetrics& m) {
  nlohmann::ordered_json j;
  j["ppl"] = m.ppl;
  j["ece_teacher_forced"] = m.ece_teacher_forced;
  j["ece_inference"] = m.ece_inference;
  j["bleu"] = m.bleu;
  j["chrf"] = m.chrf;
  j["mean_source_mass"] = m.mean_source_mass;
  j["tokens"] = m.tokens;
  j["bins"] = m.bins;
  return j;
}

nlohmann::ordered_json to_json(const TrainReport& r) {
  nlohmann::ordered_json j;
  j["smoothing"] = to_json(r.smoothing);
  j["steps"] = r.steps;
  j["target_positions"] = r.target_positions;
  j["max_target_source_mass"] = r.max_target_source_mass;
  j["source_only_gold"] = r.diagnostics.source_only_gold;
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const auto& cp : r.curve)
    curve.push_back({{"step", cp.step}, {"train_loss", cp.train_loss}, {"train_ppl", cp.train_ppl},
                     {"dev_ppl", cp.dev_ppl}});
  j["curve"] = std::move(curve);
  return j;
}

nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["smoothing"] = to_json(r.smoothing);
  j["seed"] = r.seed;
  j["train"] = to_json(r.train);
  j["dev"] = to_json(r.dev);
  return j;
}

nlohmann::ordered_json to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& run : r.runs) runs.push_back(to_json(run));
  j["runs"] = std::move(runs);
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const auto& s : r.summary) {
    nlohmann::ordered_json row;
    row["smoothing"] = to_json(s.smoothing);
    row["seeds"] = s.seeds;
    row["mean"] = to_json(s.mean);
    row["delta_vs_ls"] = s.delta_vs_ls ? to_json(*s.delta_vs_ls) : nlohmann::ordered_json();
    summary.push_back(std::move(row));
  }
  j["summary"] = std::move(summary);
  return j;
}

}  // namespace lsmask::toynmt
