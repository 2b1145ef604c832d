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

#include "lsmask/toynmt/config.hpp"

#include <functional>
#include <set>

#include "lsmask/error.hpp"
#include "lsmask/io.hpp"

namespace lsmask::toynmt {

using nlohmann::json;
using nlohmann::ordered_json;

RunConfig::RunConfig() : compare_specs(beta_grid(0.1)) {}

std::vector<SmoothingSpec> beta_grid(double alpha) {
  const auto weighted = [alpha](double t, double c, double s) {
    return SmoothingSpec{SmoothingMode::WeightedLS, alpha, Betas{t, c, s}};
  };
  return {
      SmoothingSpec{SmoothingMode::UniformLS, alpha, {}},
      weighted(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
      weighted(0.5, 0.5, 0.0),
      weighted(0.5, 0.0, 0.5),
      weighted(0.0, 0.5, 0.5),
      weighted(0.5, 0.25, 0.25),
      SmoothingSpec{SmoothingMode::MaskedLS, alpha, {}},
  };
}

SmoothingSpec parse_spec_item(std::string_view item, double default_alpha) {
  SmoothingSpec spec;
  spec.alpha = default_alpha;
  std::string_view rest = item;
  if (const auto at = rest.find('@'); at != std::string_view::npos) {
    try {
      spec.alpha = parse_double(rest.substr(at + 1));
    } catch (const std::invalid_argument&) {
      throw Error(Errc::InvalidConfig, "bad alpha in smoothing item '" + std::string(item) + "'");
    }
    rest = rest.substr(0, at);
  }
  if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
    spec.mode = parse_mode(rest.substr(0, colon));
    if (spec.mode != SmoothingMode::WeightedLS)
      throw Error(Errc::InvalidConfig, "only weighted smoothing takes betas: '" + std::string(item) + "'");
    spec.betas = parse_betas(rest.substr(colon + 1));
  } else {
    spec.mode = parse_mode(rest);
  }
  spec.validate();
  return spec;
}

std::string format_spec_item(const SmoothingSpec& s) {
  std::string out(mode_name(s.mode));
  if (s.mode == SmoothingMode::WeightedLS)
    out += ":" + format_shortest(s.betas.target) + "," + format_shortest(s.betas.common) + "," +
           format_shortest(s.betas.source);
  out += "@" + format_shortest(s.alpha);
  return out;
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(Errc::InvalidConfig, "key '" + key + "': " + why);
}

template <typename T>
T read(const json& v, const std::string& key) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) bad(key, "expected true or false");
    return v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) bad(key, "expected a string");
    return v.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<T>();
  } else {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      bad(key, "expected a non-negative integer");
    return v.get<T>();
  }
}

struct Field {
  std::string key;
  std::function<ordered_json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

template <typename T, typename Access>
Field field(std::string key, Access access) {
  return Field{key, [access](const RunConfig& c) { return ordered_json(access(const_cast<RunConfig&>(c))); },
               [access, key](RunConfig& c, const json& v) { access(c) = read<T>(v, key); }};
}

std::string join_specs(const std::vector<SmoothingSpec>& specs) {
  std::string out;
  for (std::size_t i = 0; i < specs.size(); ++i) out += (i ? ";" : "") + format_spec_item(specs[i]);
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) out += (i ? "," : "") + std::to_string(seeds[i]);
  return out;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    using Sz = std::size_t;
    using U64 = std::uint64_t;
    f.push_back(field<std::string>("out_dir", [](RunConfig& c) -> auto& { return c.out_dir; }));

    f.push_back(field<Sz>("task.n_source_only", [](RunConfig& c) -> auto& { return c.task.n_source_only; }));
    f.push_back(field<Sz>("task.n_common", [](RunConfig& c) -> auto& { return c.task.n_common; }));
    f.push_back(field<Sz>("task.n_target_only", [](RunConfig& c) -> auto& { return c.task.n_target_only; }));
    f.push_back(field<Sz>("task.min_len", [](RunConfig& c) -> auto& { return c.task.min_len; }));
    f.push_back(field<Sz>("task.max_len", [](RunConfig& c) -> auto& { return c.task.max_len; }));
    f.push_back(field<Sz>("task.train_pairs", [](RunConfig& c) -> auto& { return c.task.pairs.train; }));
    f.push_back(field<Sz>("task.dev_pairs", [](RunConfig& c) -> auto& { return c.task.pairs.dev; }));
    f.push_back(field<Sz>("task.test_pairs", [](RunConfig& c) -> auto& { return c.task.pairs.test; }));
    f.push_back(field<double>("task.common_token_rate", [](RunConfig& c) -> auto& { return c.task.common_token_rate; }));
    f.push_back(field<U64>("task.seed", [](RunConfig& c) -> auto& { return c.task.seed; }));

    f.push_back(field<Sz>("model.layers", [](RunConfig& c) -> auto& { return c.model.layers; }));
    f.push_back(field<Sz>("model.model_dim", [](RunConfig& c) -> auto& { return c.model.model_dim; }));
    f.push_back(field<Sz>("model.heads", [](RunConfig& c) -> auto& { return c.model.heads; }));
    f.push_back(field<Sz>("model.ffn_dim", [](RunConfig& c) -> auto& { return c.model.ffn_dim; }));
    f.push_back(field<double>("model.dropout", [](RunConfig& c) -> auto& { return c.model.dropout; }));
    f.push_back(field<Sz>("model.max_positions", [](RunConfig& c) -> auto& { return c.model.max_positions; }));
    f.push_back(field<U64>("model.init_seed", [](RunConfig& c) -> auto& { return c.model.init_seed; }));

    f.push_back(field<double>("train.lr", [](RunConfig& c) -> auto& { return c.train.lr; }));
    f.push_back(field<Sz>("train.warmup_steps", [](RunConfig& c) -> auto& { return c.train.warmup_steps; }));
    f.push_back(field<double>("train.warmup_init_lr", [](RunConfig& c) -> auto& { return c.train.warmup_init_lr; }));
    f.push_back(field<double>("train.adam_beta1", [](RunConfig& c) -> auto& { return c.train.adam_beta1; }));
    f.push_back(field<double>("train.adam_beta2", [](RunConfig& c) -> auto& { return c.train.adam_beta2; }));
    f.push_back(field<double>("train.adam_eps", [](RunConfig& c) -> auto& { return c.train.adam_eps; }));
    f.push_back(field<double>("train.weight_decay", [](RunConfig& c) -> auto& { return c.train.weight_decay; }));
    f.push_back(field<Sz>("train.batch_tokens", [](RunConfig& c) -> auto& { return c.train.batch_tokens; }));
    f.push_back(field<Sz>("train.max_steps", [](RunConfig& c) -> auto& { return c.train.max_steps; }));
    f.push_back(field<Sz>("train.eval_interval", [](RunConfig& c) -> auto& { return c.train.eval_interval; }));
    f.push_back(field<Sz>("train.train_eval_pairs", [](RunConfig& c) -> auto& { return c.train.train_eval_pairs; }));
    f.push_back(field<U64>("train.seed", [](RunConfig& c) -> auto& { return c.train.seed; }));

    f.push_back(Field{"smoothing.mode",
                      [](const RunConfig& c) { return ordered_json(std::string(mode_name(c.smoothing.mode))); },
                      [](RunConfig& c, const json& v) {
                        c.smoothing.mode = parse_mode(read<std::string>(v, "smoothing.mode"));
                      }});
    f.push_back(field<double>("smoothing.alpha", [](RunConfig& c) -> auto& { return c.smoothing.alpha; }));
    f.push_back(field<double>("smoothing.beta_t", [](RunConfig& c) -> auto& { return c.smoothing.betas.target; }));
    f.push_back(field<double>("smoothing.beta_c", [](RunConfig& c) -> auto& { return c.smoothing.betas.common; }));
    f.push_back(field<double>("smoothing.beta_s", [](RunConfig& c) -> auto& { return c.smoothing.betas.source; }));

    f.push_back(field<Sz>("eval.bins", [](RunConfig& c) -> auto& { return c.eval.bins; }));
    f.push_back(field<Sz>("eval.decode_extra", [](RunConfig& c) -> auto& { return c.eval.decode_extra; }));

    f.push_back(Field{"compare.specs", [](const RunConfig& c) { return ordered_json(join_specs(c.compare_specs)); },
                      [](RunConfig& c, const json& v) {
                        c.compare_specs.clear();
                        const std::string text = read<std::string>(v, "compare.specs");
                        for (auto item : split(text, ';'))
                          if (!item.empty()) c.compare_specs.push_back(parse_spec_item(item, c.smoothing.alpha));
                      }});
    f.push_back(Field{"compare.seeds", [](const RunConfig& c) { return ordered_json(join_seeds(c.compare_seeds)); },
                      [](RunConfig& c, const json& v) {
                        c.compare_seeds.clear();
                        const std::string text = read<std::string>(v, "compare.seeds");
                        for (auto item : split(text, ',')) {
                          if (item.empty()) continue;
                          try {
                            c.compare_seeds.push_back(std::stoull(std::string(item)));
                          } catch (const std::logic_error&) {
                            bad("compare.seeds", "bad seed '" + std::string(item) + "'");
                          }
                        }
                      }});
    return f;
  }();
  return all;
}

const std::string kSecond = "task.second_pair.";

}  // namespace

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  for (const auto& f : fields()) j[f.key] = f.get(c);
  const SecondPairSpec sp = c.task.second_pair.value_or(SecondPairSpec{});
  j[kSecond + "enabled"] = c.task.second_pair.has_value();
  j[kSecond + "n_source_only"] = sp.n_source_only;
  j[kSecond + "common_token_rate"] = sp.common_token_rate;
  j[kSecond + "train_pairs"] = sp.pairs.train;
  j[kSecond + "dev_pairs"] = sp.pairs.dev;
  j[kSecond + "test_pairs"] = sp.pairs.test;
  j[kSecond + "seed"] = sp.seed;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
  RunConfig c;
  std::set<std::string> known;
  // smoothing.alpha is the default alpha for compare.specs, so it goes first.
  for (const char* early : {"smoothing.alpha"})
    if (j.contains(early))
      for (const auto& f : fields())
        if (f.key == early) f.set(c, j.at(early));
  for (const auto& f : fields()) {
    known.insert(f.key);
    if (j.contains(f.key)) f.set(c, j.at(f.key));
  }

  bool enabled = false;
  SecondPairSpec sp;
  const auto second = [&](const std::string& name, auto& dst) {
    const std::string key = kSecond + name;
    known.insert(key);
    if (j.contains(key)) dst = read<std::decay_t<decltype(dst)>>(j.at(key), key);
  };
  second("enabled", enabled);
  second("n_source_only", sp.n_source_only);
  second("common_token_rate", sp.common_token_rate);
  second("train_pairs", sp.pairs.train);
  second("dev_pairs", sp.pairs.dev);
  second("test_pairs", sp.pairs.test);
  second("seed", sp.seed);
  if (enabled) c.task.second_pair = sp;

  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw Error(Errc::InvalidConfig, "unknown key '" + key + "'");

  c.task.validate();
  c.model.validate();
  c.train.validate();
  c.smoothing.validate();
  if (c.eval.bins < 1) bad("eval.bins", "must be >= 1");
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::InvalidConfig, path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidSpec || e.code() == Errc::AlphaOutOfRange || e.code() == Errc::InvalidBetas)
      throw Error(Errc::InvalidConfig, path + ": " + e.what());
    throw;
  }
}

std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace lsmask::toynmt
