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

#include "lsmask/smoothing.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "lsmask/error.hpp"
#include "lsmask/io.hpp"

namespace lsmask {

std::string_view mode_name(SmoothingMode m) noexcept {
  switch (m) {
    case SmoothingMode::OneHot: return "onehot";
    case SmoothingMode::UniformLS: return "uniform";
    case SmoothingMode::WeightedLS: return "weighted";
    case SmoothingMode::MaskedLS: return "masked";
  }
  return "?";
}

SmoothingMode parse_mode(std::string_view name) {
  if (name == "onehot") return SmoothingMode::OneHot;
  if (name == "uniform") return SmoothingMode::UniformLS;
  if (name == "weighted") return SmoothingMode::WeightedLS;
  if (name == "masked") return SmoothingMode::MaskedLS;
  throw Error(Errc::InvalidConfig, "unknown smoothing mode '" + std::string(name) + "'");
}

double Betas::of(Category c) const noexcept {
  switch (c) {
    case Category::SourceOnly: return source;
    case Category::Common: return common;
    case Category::TargetOnly: return target;
  }
  return 0.0;
}

void validate_betas(const Betas& b) {
  for (double v : {b.target, b.common, b.source})
    if (!std::isfinite(v) || v < 0.0) throw Error(Errc::InvalidBetas, "shares must be finite and >= 0");
  if (std::abs(b.target + b.common + b.source - 1.0) > 1e-12)
    throw Error(Errc::InvalidBetas, "shares must sum to 1");
}

namespace {

double parse_share(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_double(s);
  return parse_double(s.substr(0, slash)) / parse_double(s.substr(slash + 1));
}

}  // namespace

Betas parse_betas(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw Error(Errc::InvalidBetas, "expected t,c,s but got '" + std::string(text) + "'");
  Betas b;
  try {
    b.target = parse_share(parts[0]);
    b.common = parse_share(parts[1]);
    b.source = parse_share(parts[2]);
  } catch (const std::invalid_argument&) {
    throw Error(Errc::InvalidBetas, "expected t,c,s but got '" + std::string(text) + "'");
  }
  validate_betas(b);
  return b;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(Errc::AlphaOutOfRange, format_double(alpha));
}

void check_index(std::size_t vocab_size, TokenId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_size)
    throw Error(Errc::IndexOutOfRange, "correct id " + std::to_string(id) + " for K=" + std::to_string(vocab_size));
}

void check_gold(const CategoryPartition& p, TokenId id) {
  check_index(p.size(), id);
  if (p.is_excluded(id)) throw Error(Errc::IndexOutOfRange, "correct id " + std::to_string(id) + " is excluded");
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void SmoothingSpec::validate() const {
  check_alpha(alpha);
  if (mode == SmoothingMode::WeightedLS) validate_betas(betas);
}

std::string SmoothingSpec::label() const {
  std::string base;
  switch (mode) {
    case SmoothingMode::OneHot: return "onehot";
    case SmoothingMode::UniformLS: base = "ls"; break;
    case SmoothingMode::MaskedLS: base = "mls"; break;
    case SmoothingMode::WeightedLS:
      base = "wls-" + short_number(betas.target) + "-" + short_number(betas.common) + "-" + short_number(betas.source);
      break;
  }
  if (alpha != 0.1) base += "-a" + short_number(alpha);
  return base;
}

LabelDistribution one_hot(std::size_t vocab_size, TokenId correct_id) {
  check_index(vocab_size, correct_id);
  LabelDistribution d{Vec::Zero(static_cast<Eigen::Index>(vocab_size)), correct_id, 0.0};
  d.probs[correct_id] = 1.0;
  return d;
}

LabelDistribution smooth_uniform(std::size_t vocab_size, TokenId correct_id, double alpha) {
  check_index(vocab_size, correct_id);
  check_alpha(alpha);
  const double share = alpha / static_cast<double>(vocab_size);
  LabelDistribution d{Vec::Constant(static_cast<Eigen::Index>(vocab_size), share), correct_id, alpha};
  d.probs[correct_id] += 1.0 - alpha;
  return d;
}

LabelDistribution smooth_uniform(const CategoryPartition& p, TokenId correct_id, double alpha) {
  check_gold(p, correct_id);
  check_alpha(alpha);
  const std::size_t pool = p.size() - p.excluded_ids().size();
  const double share = alpha / static_cast<double>(pool);
  LabelDistribution d{Vec::Constant(static_cast<Eigen::Index>(p.size()), share), correct_id, alpha};
  for (TokenId id : p.excluded_ids()) d.probs[id] = 0.0;
  d.probs[correct_id] += 1.0 - alpha;
  return d;
}

LabelDistribution smooth_weighted(const CategoryPartition& p, TokenId correct_id, double alpha, const Betas& betas) {
  check_gold(p, correct_id);
  check_alpha(alpha);
  validate_betas(betas);
  const CategoryCounts& n = p.active_counts();
  const auto per_token = [&](Category c, std::size_t count) {
    const double beta = betas.of(c);
    if (beta == 0.0) return 0.0;
    if (count == 0)
      throw Error(Errc::EmptyClassWithMass, std::string(category_label(c)) + " class is empty but has share " +
                                                format_double(beta));
    return alpha * beta / static_cast<double>(count);
  };
  const double shares[3] = {per_token(Category::SourceOnly, n.source), per_token(Category::Common, n.common),
                            per_token(Category::TargetOnly, n.target)};

  LabelDistribution d{Vec::Zero(static_cast<Eigen::Index>(p.size())), correct_id, alpha};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (!p.is_excluded(id)) d.probs[id] = shares[static_cast<int>(p.category(id))];
  }
  d.probs[correct_id] += 1.0 - alpha;
  return d;
}

LabelDistribution smooth_masked(const CategoryPartition& p, TokenId correct_id, double alpha,
                                SmoothingDiagnostics* diag) {
  check_gold(p, correct_id);
  check_alpha(alpha);
  const CategoryCounts& n = p.active_counts();
  const std::size_t pool = n.target + n.common;
  if (pool == 0) throw Error(Errc::NoLegalTargets, "no non-excluded target or common token");
  const double share = alpha / static_cast<double>(pool);

  LabelDistribution d{Vec::Zero(static_cast<Eigen::Index>(p.size())), correct_id, alpha};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (p.category(id) != Category::SourceOnly && !p.is_excluded(id)) d.probs[id] = share;
  }
  if (p.category(correct_id) == Category::SourceOnly && diag) ++diag->source_only_gold;
  d.probs[correct_id] += 1.0 - alpha;
  return d;
}

Betas mls_as_wls_betas(const CategoryPartition& p) {
  const CategoryCounts& n = p.active_counts();
  const std::size_t pool = n.target + n.common;
  if (pool == 0) throw Error(Errc::NoLegalTargets, "no non-excluded target or common token");
  return Betas{static_cast<double>(n.target) / static_cast<double>(pool),
               static_cast<double>(n.common) / static_cast<double>(pool), 0.0};
}

LabelDistribution build_target(const SmoothingSpec& spec, const CategoryPartition& p, TokenId correct_id,
                               SmoothingDiagnostics* diag) {
  switch (spec.mode) {
    case SmoothingMode::OneHot:
      check_gold(p, correct_id);
      return one_hot(p.size(), correct_id);
    case SmoothingMode::UniformLS: return smooth_uniform(p, correct_id, spec.alpha);
    case SmoothingMode::WeightedLS: return smooth_weighted(p, correct_id, spec.alpha, spec.betas);
    case SmoothingMode::MaskedLS: return smooth_masked(p, correct_id, spec.alpha, diag);
  }
  throw Error(Errc::InvalidConfig, "unknown smoothing mode");
}

std::string_view violation_name(Violation v) noexcept {
  switch (v) {
    case Violation::CorrectIdOutOfRange: return "CorrectIdOutOfRange";
    case Violation::NegativeEntry: return "NegativeEntry";
    case Violation::NonFiniteEntry: return "NonFiniteEntry";
    case Violation::SumNotOne: return "SumNotOne";
    case Violation::GoldBelowFloor: return "GoldBelowFloor";
  }
  return "?";
}

std::vector<Violation> validate(const LabelDistribution& d) {
  std::vector<Violation> out;
  if (!d.probs.allFinite()) out.push_back(Violation::NonFiniteEntry);
  if ((d.probs.array() < 0.0).any()) out.push_back(Violation::NegativeEntry);
  if (!(std::abs(d.probs.sum() - 1.0) <= 1e-9)) out.push_back(Violation::SumNotOne);
  if (d.correct_id < 0 || d.correct_id >= d.probs.size()) {
    out.push_back(Violation::CorrectIdOutOfRange);
  } else if (!(d.probs[d.correct_id] >= 1.0 - d.alpha)) {
    out.push_back(Violation::GoldBelowFloor);
  }
  return out;
}

std::string dump_distribution(const SmoothingSpec& spec, const LabelDistribution& d) {
  std::ostringstream out;
  out << "K " << d.probs.size() << '\n';
  out << "alpha " << format_double(d.alpha) << '\n';
  out << "mode " << mode_name(spec.mode) << '\n';
  out << "betas " << format_double(spec.betas.target) << ' ' << format_double(spec.betas.common) << ' '
      << format_double(spec.betas.source) << '\n';
  out << "correct_id " << d.correct_id << '\n';
  out << "probs";
  for (Eigen::Index i = 0; i < d.probs.size(); ++i) out << ' ' << format_double(d.probs[i]);
  out << '\n';
  return out.str();
}

DistributionRecord parse_distribution(std::string_view text) {
  const auto lines = split_lines(text);
  static constexpr std::string_view keys[] = {"K", "alpha", "mode", "betas", "correct_id", "probs"};
  if (lines.size() != std::size(keys)) throw Error(Errc::MalformedRow, "expected 6 lines");
  std::vector<std::vector<std::string>> fields;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto f = split_whitespace(lines[i]);
    if (f.empty() || f[0] != keys[i]) throw Error(Errc::MalformedRow, std::to_string(i + 1));
    f.erase(f.begin());
    fields.push_back(std::move(f));
  }
  DistributionRecord rec;
  try {
    const long k = std::stol(fields[0].at(0));
    if (k < 1 || fields[0].size() != 1) throw Error(Errc::MalformedRow, "1");
    rec.dist.alpha = parse_double(fields[1].at(0));
    rec.spec.alpha = rec.dist.alpha;
    rec.spec.mode = parse_mode(fields[2].at(0));
    if (fields[3].size() != 3) throw Error(Errc::MalformedRow, "4");
    rec.spec.betas = Betas{parse_double(fields[3][0]), parse_double(fields[3][1]), parse_double(fields[3][2])};
    rec.dist.correct_id = std::stol(fields[4].at(0));
    if (fields[5].size() != static_cast<std::size_t>(k)) throw Error(Errc::MalformedRow, "6");
    rec.dist.probs.resize(k);
    for (long i = 0; i < k; ++i) rec.dist.probs[i] = parse_double(fields[5][static_cast<std::size_t>(i)]);
  } catch (const std::logic_error& e) {
    throw Error(Errc::MalformedRow, e.what());
  }
  return rec;
}

}  // namespace lsmask
