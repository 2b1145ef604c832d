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


#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "lsmask/cli.hpp"
#include "lsmask/io.hpp"
#include "lsmask/smoothing.hpp"
#include "oracles.hpp"

using namespace lsmask;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "lsmask");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Ten tokens: four target-only (w0 first), three common, three source-only.
std::string fixture_partition(const std::string& dir) {
  std::string tsv;
  for (int i = 0; i < 10; ++i)
    tsv += "w" + std::to_string(i) + "\t" + (i < 4 ? "target" : i < 7 ? "common" : "source") + "\t0\n";
  write_text_file(dir + "/fixture.tsv", tsv);
  return dir + "/fixture.tsv";
}

std::string tiny_config(const std::string& dir) {
  nlohmann::json j{{"out_dir", dir},          {"task.train_pairs", 200}, {"task.dev_pairs", 20},
                   {"task.test_pairs", 20},   {"model.layers", 1},       {"model.model_dim", 16},
                   {"model.ffn_dim", 32},     {"model.max_positions", 16}, {"train.max_steps", 30},
                   {"train.warmup_steps", 10}, {"train.eval_interval", 10}, {"train.train_eval_pairs", 20},
                   {"compare.specs", "uniform;masked"}, {"compare.seeds", "1,2"}};
  write_text_file(dir + ".json", j.dump(2));
  return dir + ".json";
}

}  // namespace

TEST_CASE("partition command on the three-token fixture") {
  const std::string dir = oracle::scratch_dir("cli_partition");
  write_text_file(dir + "/src.vocab", "a\nb\n");
  write_text_file(dir + "/tgt.vocab", "b\nc\n");
  write_text_file(dir + "/joint.vocab", "a\nb\nc\n");
  const Result r = run({"partition", "--joint", dir + "/joint.vocab", "--src", dir + "/src.vocab", "--tgt",
                        dir + "/tgt.vocab", "--special", "", "--out", dir + "/p.tsv"});
  CHECK(r.code == kExitOk);
  CHECK(read_text_file(dir + "/p.tsv") == "a\tsource\t0\nb\tcommon\t0\nc\ttarget\t0\n");
  CHECK(r.out.find("common\t1") != std::string::npos);

  const Result again = run({"partition", "--src", dir + "/src.vocab", "--tgt", dir + "/tgt.vocab", "--out",
                            dir + "/p.tsv"});
  CHECK(again.code == kExitUsage);
  CHECK(again.err.find("--force") != std::string::npos);

  const Result missing = run({"partition", "--src", dir + "/nope.vocab", "--tgt", dir + "/tgt.vocab", "--out",
                              dir + "/q.tsv"});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("nope.vocab") != std::string::npos);

  write_text_file(dir + "/orphan.vocab", "a\nb\nc\nzz\n");
  const Result orphan = run({"partition", "--joint", dir + "/orphan.vocab", "--src", dir + "/src.vocab", "--tgt",
                             dir + "/tgt.vocab", "--out", dir + "/r.tsv"});
  CHECK(orphan.code == kExitUsage);
  CHECK(orphan.err.find("zz") != std::string::npos);
}

TEST_CASE("smooth command prints the distribution record") {
  const std::string dir = oracle::scratch_dir("cli_smooth");
  const std::string p = fixture_partition(dir);
  const Result m = run({"smooth", "--partition", p, "--correct", "w0", "--alpha", "0.1", "--mode", "masked"});
  REQUIRE(m.code == kExitOk);
  const DistributionRecord rec = parse_distribution(m.out);
  CHECK(std::fabs(rec.dist.probs[0] - 0.91428571428571428) <= 1e-12);
  for (int i = 1; i < 7; ++i) CHECK(std::fabs(rec.dist.probs[i] - 0.014285714285714286) <= 1e-12);
  for (int i = 7; i < 10; ++i) CHECK(rec.dist.probs[i] == 0.0);

  const Result u = run({"smooth", "--partition", p, "--correct", "w2", "--alpha", "0", "--mode", "uniform"});
  REQUIRE(u.code == kExitOk);
  CHECK(parse_distribution(u.out).dist.probs == one_hot(10, 2).probs);

  write_text_file(dir + "/nosrc.tsv", "a\ttarget\t0\nb\tcommon\t0\n");
  const Result e = run({"smooth", "--partition", dir + "/nosrc.tsv", "--correct", "a", "--mode", "weighted",
                        "--betas", "1/3,1/3,1/3"});
  CHECK(e.code == kExitUsage);
  CHECK(e.err.find("EmptyClassWithMass") != std::string::npos);

  CHECK(run({"smooth", "--partition", p, "--correct", "nothere", "--mode", "masked"}).code == kExitUsage);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  const Result h = run({"train", "--help"});
  CHECK(h.code == kExitOk);
  for (const char* flag : {"--config", "--out", "--force"}) CHECK(h.out.find(flag) != std::string::npos);
  const Result d = run({"defaults"});
  CHECK(d.code == kExitOk);
  CHECK(nlohmann::json::parse(d.out).contains("train.lr"));
}

TEST_CASE("gen, train, eval and compare write reproducible run directories") {
  const std::string dir = oracle::scratch_dir("cli_run");
  const std::string cfg = tiny_config(dir);
  REQUIRE(run({"gen", "--config", cfg}).code == kExitOk);
  CHECK(fs::exists(dir + "/data/train.src"));
  CHECK(fs::exists(dir + "/config.resolved.json"));
  CHECK(run({"gen", "--config", cfg}).code == kExitUsage);

  REQUIRE(run({"train", "--config", cfg}).code == kExitOk);
  const std::string report = dir + "/train_report_mls_seed1.json";
  REQUIRE(fs::exists(report));
  CHECK(fs::exists(dir + "/model_mls_seed1.bin"));
  REQUIRE(run({"eval", "--run", dir}).code == kExitOk);
  const auto eval = nlohmann::json::parse(read_text_file(dir + "/eval_report_mls_seed1.json"));
  CHECK(eval.contains("dev"));
  CHECK(eval.contains("test"));
  CHECK(fs::exists(dir + "/calibration_mls_seed1.txt"));
  CHECK(run({"eval", "--run", dir}).code == kExitUsage);

  // Re-run from the archived config elsewhere.
  const std::string redo = oracle::scratch_dir("cli_run_redo");
  REQUIRE(run({"train", "--config", dir + "/config.resolved.json", "--out", redo}).code == kExitOk);
  REQUIRE(run({"eval", "--run", redo}).code == kExitOk);
  CHECK(read_text_file(redo + "/train_report_mls_seed1.json") == read_text_file(report));
  CHECK(read_text_file(redo + "/model_mls_seed1.bin") == read_text_file(dir + "/model_mls_seed1.bin"));
  CHECK(read_text_file(redo + "/eval_report_mls_seed1.json") == read_text_file(dir + "/eval_report_mls_seed1.json"));

  const Result c = run({"compare", "--config", cfg});
  REQUIRE(c.code == kExitOk);
  const auto cmp = nlohmann::json::parse(read_text_file(dir + "/compare_report.json"));
  CHECK(cmp["runs"].size() == 4);
  CHECK(cmp["summary"].size() == 2);
}

TEST_CASE("divergence maps to its own exit code") {
  const std::string dir = oracle::scratch_dir("cli_diverge");
  const std::string cfg = tiny_config(dir);
  auto j = nlohmann::json::parse(read_text_file(cfg));
  j["train.lr"] = 1e200;
  j["train.warmup_init_lr"] = 1e200;
  write_text_file(cfg, j.dump());
  const Result r = run({"train", "--config", cfg});
  CHECK(r.code == kExitDiverged);
  CHECK(r.err.find("DivergedLoss") != std::string::npos);
  write_text_file(cfg, "{\"bogus\": 1}");
  CHECK(run({"train", "--config", cfg}).code == kExitUsage);
}
