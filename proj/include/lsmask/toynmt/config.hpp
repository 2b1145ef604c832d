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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lsmask/smoothing.hpp"
#include "lsmask/toynmt/experiment.hpp"
#include "lsmask/toynmt/model.hpp"
#include "lsmask/toynmt/synthetic.hpp"
#include "lsmask/toynmt/train.hpp"

namespace lsmask::toynmt {

/// Everything one command needs. Serialized as a flat JSON object with
/// dotted keys ("task.n_common", "train.lr", ...). Unknown keys are rejected
/// and missing keys take the defaults below.
struct RunConfig {
  std::string out_dir = "runs/default";
  SyntheticTaskSpec task;
  ModelConfig model;
  TrainConfig train;
  SmoothingSpec smoothing{SmoothingMode::MaskedLS, 0.1, {}};
  EvalOptions eval;
  std::vector<SmoothingSpec> compare_specs;
  std::vector<std::uint64_t> compare_seeds{1, 2, 3, 4, 5};

  RunConfig();
};

/// Uniform smoothing, the five weighted settings of the beta grid and masked
/// smoothing, all at `alpha`.
std::vector<SmoothingSpec> beta_grid(double alpha);

/// "mode[:t,c,s][@alpha]", e.g. "masked", "weighted:1/2,1/2,0@0.2".
SmoothingSpec parse_spec_item(std::string_view item, double default_alpha);
std::string format_spec_item(const SmoothingSpec& s);

nlohmann::ordered_json to_json(const RunConfig& c);
/// Throws InvalidConfig naming the offending key.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Pretty-printed JSON with a trailing newline.
std::string dump_config(const RunConfig& c);

}  // namespace lsmask::toynmt
