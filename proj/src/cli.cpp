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

#include "lsmask/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "lsmask/error.hpp"
#include "lsmask/io.hpp"
#include "lsmask/smoothing.hpp"
#include "lsmask/toynmt/config.hpp"
#include "lsmask/toynmt/evaluate.hpp"
#include "lsmask/toynmt/experiment.hpp"
#include "lsmask/toynmt/model.hpp"
#include "lsmask/toynmt/synthetic.hpp"
#include "lsmask/toynmt/train.hpp"
#include "lsmask/vocab.hpp"

namespace fs = std::filesystem;

namespace lsmask {

namespace {

using namespace toynmt;

const char* const kResolvedConfig = "config.resolved.json";
const char* const kDataDir = "data";

void refuse_existing(const std::vector<std::string>& paths, bool force) {
  if (force) return;
  for (const auto& p : paths)
    if (fs::exists(p)) throw Error(Errc::Io, "'" + p + "' already exists (pass --force to overwrite)");
}

/// Writes the resolved config unless an identical one is already there.
void archive_config(const RunConfig& cfg, bool force) {
  fs::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/" + kResolvedConfig;
  const std::string text = dump_config(cfg);
  if (fs::exists(path) && !force && read_text_file(path) != text)
    throw Error(Errc::Io, "'" + path + "' exists with different settings (pass --force to overwrite)");
  write_text_file(path, text);
}

RunConfig resolve(const std::string& config_path, const std::string& out_override) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  return cfg;
}

std::string run_tag(const RunConfig& cfg) {
  return cfg.smoothing.label() + "_seed" + std::to_string(cfg.train.seed);
}

ParallelCorpus corpus_for(const RunConfig& cfg, bool force, std::ostream& out) {
  const std::string dir = cfg.out_dir + "/" + kDataDir;
  if (fs::exists(dir + "/partition.tsv") && !force) {
    out << "using corpus in " << dir << "\n";
    return read_corpus(dir);
  }
  ParallelCorpus corpus = gen_synthetic(cfg.task);
  write_corpus(corpus, dir);
  return corpus;
}

void print_stats(const CategoryStats& s, std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  out << "source\t" << s.counts.source << '\t' << s.p_source << '\n';
  out << "common\t" << s.counts.common << '\t' << s.p_common << '\n';
  out << "target\t" << s.counts.target << '\t' << s.p_target << '\n';
  out << std::defaultfloat;
}

void print_metrics(const std::string& name, const EvalMetrics& m, std::ostream& out) {
  out << name << ": ppl " << format_shortest(m.ppl) << "  bleu " << format_shortest(m.bleu) << "  chrf "
      << format_shortest(m.chrf) << "  ece_tf " << format_shortest(m.ece_teacher_forced) << "  ece_inf "
      << format_shortest(m.ece_inference) << "  source_mass " << format_shortest(m.mean_source_mass) << '\n';
}

int cmd_partition(const std::string& joint_path, const std::string& src_path, const std::string& tgt_path,
                  const std::string& special, const std::string& out_path, bool force, std::ostream& out) {
  refuse_existing({out_path}, force);
  const Vocabulary src = load_vocab_file(src_path);
  const Vocabulary tgt = load_vocab_file(tgt_path);
  const Vocabulary joint = joint_path.empty() ? build_joint(src, tgt) : load_vocab_file(joint_path);
  std::set<std::string> specials;
  for (auto tok : split(special, ','))
    if (!tok.empty()) specials.emplace(tok);
  const CategoryPartition p = partition(joint, src, tgt, specials);
  write_text_file(out_path, serialize_partition(p));
  out << "wrote " << out_path << " (" << p.size() << " tokens)\n";
  print_stats(stats(p), out);
  return kExitOk;
}

int cmd_smooth(const std::string& partition_path, const std::string& correct, double alpha, const std::string& mode,
               const std::string& betas, std::ostream& out) {
  const CategoryPartition p = load_partition_file(partition_path);
  SmoothingSpec spec;
  spec.mode = parse_mode(mode);
  spec.alpha = spec.mode == SmoothingMode::OneHot ? 0.0 : alpha;
  if (!betas.empty()) spec.betas = parse_betas(betas);
  spec.validate();
  const TokenId id = p.joint().id(correct);
  const LabelDistribution d = build_target(spec, p, id);
  out << dump_distribution(spec, d);
  return kExitOk;
}

int cmd_gen(const std::string& config_path, const std::string& out_dir, bool force, std::ostream& out) {
  const RunConfig cfg = resolve(config_path, out_dir);
  const std::string data = cfg.out_dir + "/" + kDataDir;
  refuse_existing({data + "/partition.tsv"}, force);
  archive_config(cfg, force);
  const ParallelCorpus corpus = gen_synthetic(cfg.task);
  write_corpus(corpus, data);
  out << "wrote corpus to " << data << ": " << corpus.train.size() << " train, " << corpus.dev.size() << " dev, "
      << corpus.test.size() << " test pairs, joint vocabulary " << corpus.joint.size() << "\n";
  print_stats(stats(corpus.partition), out);
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& out_dir, bool force, std::ostream& out) {
  const RunConfig cfg = resolve(config_path, out_dir);
  const std::string tag = run_tag(cfg);
  const std::string model_path = cfg.out_dir + "/model_" + tag + ".bin";
  const std::string report_path = cfg.out_dir + "/train_report_" + tag + ".json";
  refuse_existing({model_path, report_path}, force);
  archive_config(cfg, force);
  const ParallelCorpus corpus = corpus_for(cfg, force, out);

  Model model = init_model(cfg.model, corpus.joint.size());
  const TrainReport report = train(model, corpus, cfg.smoothing, cfg.train);
  save_model(model, model_path);
  write_text_file(report_path, to_json(report).dump(2) + "\n");
  const Checkpoint& last = report.curve.back();
  out << "trained " << tag << " for " << report.steps << " steps: train ppl " << format_shortest(last.train_ppl)
      << ", dev ppl " << format_shortest(last.dev_ppl) << "\n";
  out << "wrote " << model_path << " and " << report_path << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& run_dir, bool force, std::ostream& out) {
  RunConfig cfg = load_config(run_dir + "/" + kResolvedConfig);
  cfg.out_dir = run_dir;
  const std::string tag = run_tag(cfg);
  const std::string report_path = run_dir + "/eval_report_" + tag + ".json";
  const std::string table_path = run_dir + "/calibration_" + tag + ".txt";
  refuse_existing({report_path, table_path}, force);
  const ParallelCorpus corpus = read_corpus(run_dir + "/" + kDataDir);
  const Model model = load_model(cfg.model, corpus.joint.size(), run_dir + "/model_" + tag + ".bin");

  nlohmann::ordered_json j;
  j["smoothing"] = to_json(cfg.smoothing);
  j["seed"] = cfg.train.seed;
  std::string tables;
  const std::pair<const char*, const std::vector<SentencePair>*> splits[] = {{"dev", &corpus.dev},
                                                                             {"test", &corpus.test}};
  for (const auto& [name, pairs] : splits) {
    if (pairs->empty()) continue;
    const EvalMetrics m = evaluate(model, *pairs, corpus, cfg.eval.bins, cfg.eval.decode_extra, cfg.model.max_positions);
    j[name] = to_json(m);
    tables += std::string("# ") + name + " inference\n" + format_calibration(m.inference_table);
    tables += std::string("# ") + name + " teacher-forced\n" + format_calibration(m.teacher_forced_table);
    print_metrics(name, m, out);
  }
  write_text_file(report_path, j.dump(2) + "\n");
  write_text_file(table_path, tables);
  out << "wrote " << report_path << " and " << table_path << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir, bool force, std::ostream& out) {
  const RunConfig cfg = resolve(config_path, out_dir);
  const std::string report_path = cfg.out_dir + "/compare_report.json";
  refuse_existing({report_path}, force);
  archive_config(cfg, force);
  const ParallelCorpus corpus = corpus_for(cfg, force, out);
  const ExperimentReport report =
      compare(corpus, cfg.model, cfg.train, cfg.compare_specs, cfg.compare_seeds, cfg.eval);
  write_text_file(report_path, to_json(report).dump(2) + "\n");
  out << "label\tbleu\tchrf\tppl\tece_inf\tsource_mass\td_bleu\n";
  for (const auto& s : report.summary) {
    out << s.smoothing.label() << '\t' << format_shortest(s.mean.bleu) << '\t' << format_shortest(s.mean.chrf) << '\t'
        << format_shortest(s.mean.ppl) << '\t' << format_shortest(s.mean.ece_inference) << '\t'
        << format_shortest(s.mean.mean_source_mass) << '\t'
        << (s.delta_vs_ls ? format_shortest(s.delta_vs_ls->bleu) : std::string("-")) << '\n';
  }
  out << "wrote " << report_path << " (" << report.runs.size() << " runs)\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Language-aware label smoothing toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string joint, src, tgt, special = "<pad>,<s>,</s>,<unk>", out_path;
  std::string partition_path, correct, mode, betas;
  double alpha = 0.1;
  std::string config_path, out_dir, run_dir;
  bool force = false;

  auto* part = app.add_subcommand("partition", "Split a joint vocabulary into source/common/target tokens");
  part->add_option("--joint", joint, "Joint vocabulary file (built from --src and --tgt when omitted)");
  part->add_option("--src", src, "Source vocabulary file")->required();
  part->add_option("--tgt", tgt, "Target vocabulary file")->required();
  part->add_option("--special", special, "Comma-separated control tokens classified as common")->capture_default_str();
  part->add_option("--out", out_path, "Partition TSV to write")->required();
  part->add_flag("--force", force, "Overwrite existing output");

  auto* smooth = app.add_subcommand("smooth", "Print the target distribution for one gold token");
  smooth->add_option("--partition", partition_path, "Partition TSV")->required();
  smooth->add_option("--correct", correct, "Gold token")->required();
  smooth->add_option("--alpha", alpha, "Smoothing mass in [0, 1)")->capture_default_str();
  smooth->add_option("--mode", mode, "onehot | uniform | weighted | masked")->required();
  smooth->add_option("--betas", betas, "Weighted shares t,c,s (decimals or fractions)");

  auto* gen = app.add_subcommand("gen", "Generate the synthetic corpus of a run config");
  auto* trn = app.add_subcommand("train", "Train one model from a run config");
  auto* cmp = app.add_subcommand("compare", "Train and evaluate every (spec, seed) cell of a run config");
  for (auto* sub : {gen, trn, cmp}) {
    sub->add_option("--config", config_path, "Run config (flat JSON)")->required();
    sub->add_option("--out", out_dir, "Override the config's out_dir");
    sub->add_flag("--force", force, "Overwrite existing outputs");
  }

  auto* evl = app.add_subcommand("eval", "Evaluate a trained run on its dev and test splits");
  evl->add_option("--run", run_dir, "Run directory written by train")->required();
  evl->add_flag("--force", force, "Overwrite existing outputs");

  auto* defaults = app.add_subcommand("defaults", "Print the default run config");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*part) return cmd_partition(joint, src, tgt, special, out_path, force, out);
    if (*smooth) return cmd_smooth(partition_path, correct, alpha, mode, betas, out);
    if (*gen) return cmd_gen(config_path, out_dir, force, out);
    if (*trn) return cmd_train(config_path, out_dir, force, out);
    if (*evl) return cmd_eval(run_dir, force, out);
    if (*cmp) return cmd_compare(config_path, out_dir, force, out);
    if (*defaults) {
      out << dump_config(RunConfig{});
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::DivergedLoss ? kExitDiverged : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace lsmask
