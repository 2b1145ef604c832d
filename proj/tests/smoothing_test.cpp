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

#include <cmath>

#include "lsmask/error.hpp"
#include "lsmask/smoothing.hpp"
#include "oracles.hpp"

using namespace lsmask;

namespace {

// K = 10: ids 0..3 target-only (0 is the gold token), 4..6 common, 7..9
// source-only.
CategoryPartition ten_token_fixture() {
  std::vector<std::string> tokens;
  std::vector<Category> cats;
  for (int i = 0; i < 10; ++i) {
    tokens.push_back("w" + std::to_string(i));
    cats.push_back(i < 4 ? Category::TargetOnly : i < 7 ? Category::Common : Category::SourceOnly);
  }
  return CategoryPartition(Vocabulary(tokens), cats, {});
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no lsmask::Error thrown");
  return Errc::Io;
}

}  // namespace

TEST_CASE("fixture: weighted thirds") {
  const LabelDistribution d = smooth_weighted(ten_token_fixture(), 0, 0.1, Betas{});
  CHECK(std::fabs(d.probs[0] - 0.9083333333333333) <= 1e-12);
  for (int i = 1; i < 4; ++i) CHECK(std::fabs(d.probs[i] - 0.0083333333333333333) <= 1e-12);
  for (int i = 4; i < 10; ++i) CHECK(std::fabs(d.probs[i] - 0.011111111111111111) <= 1e-12);
  CHECK(validate(d).empty());
}

TEST_CASE("fixture: masked") {
  const LabelDistribution d = smooth_masked(ten_token_fixture(), 0, 0.1);
  CHECK(std::fabs(d.probs[0] - 0.91428571428571428) <= 1e-12);
  for (int i = 1; i < 7; ++i) CHECK(std::fabs(d.probs[i] - 0.014285714285714286) <= 1e-12);
  for (int i = 7; i < 10; ++i) CHECK(d.probs[i] == 0.0);
}

TEST_CASE("fixture: uniform and one-hot") {
  const LabelDistribution u = smooth_uniform(ten_token_fixture(), 3, 0.1);
  CHECK(u.probs[3] == doctest::Approx(0.91));
  CHECK(u.probs[9] == doctest::Approx(0.01));
  CHECK(smooth_uniform(10, 3, 0.1).probs == u.probs);
  const LabelDistribution o = one_hot(10, 2);
  CHECK(o.probs.sum() == 1.0);
  CHECK(o.probs[2] == 1.0);
}

TEST_CASE("padding receives nothing and does not dilute the pools") {
  std::vector<Category> cats{Category::Common, Category::TargetOnly, Category::TargetOnly, Category::SourceOnly};
  const CategoryPartition p(Vocabulary({"<pad>", "a", "b", "x"}), cats, {0});
  const LabelDistribution u = smooth_uniform(p, 1, 0.3);
  CHECK(u.probs[0] == 0.0);
  CHECK(u.probs[1] == doctest::Approx(0.8));
  CHECK(u.probs[3] == doctest::Approx(0.1));
  const LabelDistribution m = smooth_masked(p, 1, 0.3);
  CHECK(m.probs[0] == 0.0);
  CHECK(m.probs[2] == doctest::Approx(0.15));
  CHECK(code_of([&] { smooth_masked(p, 0, 0.1); }) == Errc::IndexOutOfRange);
  // The common class is empty once padding is excluded.
  CHECK(code_of([&] { smooth_weighted(p, 1, 0.1, Betas{}); }) == Errc::EmptyClassWithMass);
  CHECK(smooth_weighted(p, 1, 0.1, Betas{0.5, 0.0, 0.5}).probs[3] == doctest::Approx(0.05));
}

TEST_CASE("a source-only gold token keeps 1 - alpha and is counted") {
  SmoothingDiagnostics diag;
  const LabelDistribution d = smooth_masked(ten_token_fixture(), 8, 0.1, &diag);
  CHECK(diag.source_only_gold == 1);
  CHECK(d.probs[8] == doctest::Approx(0.9));
  CHECK(d.probs.sum() == doctest::Approx(1.0));
}

TEST_CASE("random instances match the class formulas") {
  toynmt::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const CategoryPartition p = oracle::random_partition(rng);
    TokenId gold;
    do gold = static_cast<TokenId>(rng.index(p.size()));
    while (p.is_excluded(gold));
    const double alpha = rng.uniform() * 0.5;
    const Betas b = oracle::random_betas(rng, p.active_counts());

    const auto w = smooth_weighted(p, gold, alpha, b);
    const auto we = oracle::expected_weighted(p.categories(), p.excluded_ids(), gold, alpha, b);
    const auto m = smooth_masked(p, gold, alpha);
    const auto me = oracle::expected_masked(p.categories(), p.excluded_ids(), gold, alpha);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(std::fabs(w.probs[i] - static_cast<double>(we[i])) <= 1e-15);
      CHECK(std::fabs(m.probs[i] - static_cast<double>(me[i])) <= 1e-15);
    }
    const auto eq = smooth_weighted(p, gold, alpha, mls_as_wls_betas(p));
    CHECK((eq.probs - m.probs).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("equivalent shares differ from half-half when class sizes differ") {
  const CategoryPartition p = ten_token_fixture();
  const Betas b = mls_as_wls_betas(p);
  CHECK(b.target == doctest::Approx(4.0 / 7.0));
  CHECK(b.common == doctest::Approx(3.0 / 7.0));
  CHECK(b.source == 0.0);
  const auto half = smooth_weighted(p, 0, 0.1, Betas{0.5, 0.5, 0.0});
  CHECK((half.probs - smooth_masked(p, 0, 0.1).probs).cwiseAbs().maxCoeff() > 1e-4);
}

TEST_CASE("argument validation") {
  const CategoryPartition p = ten_token_fixture();
  CHECK(code_of([&] { smooth_masked(p, 0, 1.0); }) == Errc::AlphaOutOfRange);
  CHECK(code_of([&] { smooth_masked(p, 0, -0.1); }) == Errc::AlphaOutOfRange);
  CHECK(code_of([&] { smooth_masked(p, 10, 0.1); }) == Errc::IndexOutOfRange);
  CHECK(code_of([&] { smooth_weighted(p, 0, 0.1, Betas{0.5, 0.5, 0.5}); }) == Errc::InvalidBetas);
  CHECK(code_of([&] { smooth_weighted(p, 0, 0.1, Betas{1.5, -0.5, 0.0}); }) == Errc::InvalidBetas);
  CHECK(code_of([] { parse_betas("1/2,1/2"); }) == Errc::InvalidBetas);
  CHECK(code_of([] { parse_betas("a,b,c"); }) == Errc::InvalidBetas);
  CHECK(code_of([] { parse_mode("label"); }) == Errc::InvalidConfig);
  CHECK(parse_betas("1/2,1/4,0.25") == Betas{0.5, 0.25, 0.25});
  CHECK(smooth_masked(p, 0, 0.0).probs == one_hot(10, 0).probs);
}

TEST_CASE("labels and mode names") {
  CHECK(SmoothingSpec{SmoothingMode::UniformLS, 0.1, {}}.label() == "ls");
  CHECK(SmoothingSpec{SmoothingMode::MaskedLS, 0.2, {}}.label() == "mls-a0.2");
  CHECK(SmoothingSpec{SmoothingMode::WeightedLS, 0.1, {0.5, 0.5, 0.0}}.label() == "wls-0.5-0.5-0");
  CHECK(SmoothingSpec{SmoothingMode::OneHot, 0.1, {}}.label() == "onehot");
  for (auto m : {SmoothingMode::OneHot, SmoothingMode::UniformLS, SmoothingMode::WeightedLS, SmoothingMode::MaskedLS})
    CHECK(parse_mode(mode_name(m)) == m);
}

TEST_CASE("validate flags broken distributions") {
  LabelDistribution d = smooth_uniform(4, 1, 0.2);
  CHECK(validate(d).empty());
  d.probs[0] = -0.05;
  const auto v = validate(d);
  CHECK(std::find(v.begin(), v.end(), Violation::NegativeEntry) != v.end());
  CHECK(std::find(v.begin(), v.end(), Violation::SumNotOne) != v.end());
  LabelDistribution low = smooth_uniform(4, 1, 0.2);
  low.probs[1] = 0.5;
  low.probs[0] += 0.35;
  const auto lv = validate(low);
  CHECK(std::find(lv.begin(), lv.end(), Violation::GoldBelowFloor) != lv.end());
}

TEST_CASE("distribution dump round trip is bit exact") {
  toynmt::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CategoryPartition p = oracle::random_partition(rng);
    TokenId gold;
    do gold = static_cast<TokenId>(rng.index(p.size()));
    while (p.is_excluded(gold));
    const SmoothingSpec spec{SmoothingMode::WeightedLS, rng.uniform() * 0.9, oracle::random_betas(rng, p.active_counts())};
    const LabelDistribution d = build_target(spec, p, gold);
    const DistributionRecord r = parse_distribution(dump_distribution(spec, d));
    CHECK(r.spec == spec);
    CHECK(r.dist.correct_id == gold);
    CHECK(r.dist.probs == d.probs);
  }
  CHECK(code_of([] { parse_distribution("K 2\nalpha 0.1\n"); }) == Errc::MalformedRow);
}
