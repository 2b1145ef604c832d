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
#include <vector>

#include <json.hpp>

#include "lsmask/smoothing.hpp"
#include "lsmask/toynmt/evaluate.hpp"
#include "lsmask/toynmt/model.hpp"
#include "lsmask/toynmt/train.hpp"

namespace lsmask::toynmt {

struct EvalOptions {
  std::size_t bins = 10;
  std::size_t decode_extra = 4;
};

struct RunRecord {
  SmoothingSpec smoothing;
  std::uint64_t seed = 0;
  TrainReport train;
  EvalMetrics dev;
};

/// Per-spec means over seeds and their difference to the first UniformLS
/// spec of the comparison.
struct SpecSummary {
  SmoothingSpec smoothing;
  std::size_t seeds = 0;
  EvalMetrics mean;
  std::optional<EvalMetrics> delta_vs_ls;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;  // spec-major, then seed
  std::vector<SpecSummary> summary;
};

/// init -> train -> evaluate on dev, with model.init_seed and train.seed both
/// replaced by `seed`. The trained model is moved into *trained when given.
RunRecord run_single(const ParallelCorpus& corpus, const ModelConfig& mc, const TrainConfig& tc,
                     const SmoothingSpec& smoothing, std::uint64_t seed, const EvalOptions& eval,
                     Model* trained = nullptr);

/// One run per (spec, seed), merged in spec-then-seed order.
ExperimentReport compare(const ParallelCorpus& corpus, const ModelConfig& mc, const TrainConfig& tc,
                         const std::vector<SmoothingSpec>& specs, const std::vector<std::uint64_t>& seeds,
                         const EvalOptions& eval);

nlohmann::ordered_json to_json(const SmoothingSpec& s);
nlohmann::ordered_json to_json(const EvalMetrics& m);
nlohmann::ordered_json to_json(const TrainReport& r);
nlohmann::ordered_json to_json(const RunRecord& r);
nlohmann::ordered_json to_json(const ExperimentReport& r);

}  // namespace lsmask::toynmt
