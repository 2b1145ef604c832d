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
#include <string>
#include <string_view>
#include <vector>

namespace lsmask {

/// One prediction: the probability of the predicted token and whether it
/// matched the reference.
struct PredictionSample {
  double confidence = 0.0;
  bool correct = false;
};

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_confidence = 0.0;  // 0 for an empty bin
  double accuracy = 0.0;         // 0 for an empty bin
};

struct CalibrationReport {
  std::size_t bins_count = 0;  // M
  std::size_t samples = 0;     // N
  std::vector<CalibrationBin> bins;
  double ece = 0.0;
};

/// Expected calibration error over M equal-width confidence bins. Bin i holds
/// confidences in [i/M, (i+1)/M); the last bin is closed at 1. Throws
/// EmptySamples, ZeroBins, or NonFiniteInput for a confidence outside [0, 1].
CalibrationReport ece(const std::vector<PredictionSample>& samples, std::size_t bins);

/// Same report as ece(); kept as the tabulation entry point.
CalibrationReport reliability_table(const std::vector<PredictionSample>& samples, std::size_t bins);

/// Key-value header (M, N, ece) followed by one tab-separated row per bin.
std::string format_calibration(const CalibrationReport& r);

using TokenSeq = std::vector<std::string>;

/// Corpus BLEU: clipped n-gram precisions for n = 1..max_n pooled over the
/// corpus, flat geometric mean, brevity penalty, no smoothing.
double bleu(const std::vector<TokenSeq>& hypotheses, const std::vector<TokenSeq>& references, std::size_t max_n = 4);

/// Corpus chrF: character n-gram precision and recall from pooled counts,
/// each averaged over the orders that have both hypothesis and reference
/// n-grams, then combined into one F-beta.
/// Whitespace is removed before extraction; characters are UTF-8 code points.
double chrf(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            std::size_t max_n = 6, double beta = 2.0);

/// Joins tokens with single spaces.
std::string detokenize(const TokenSeq& tokens);

}  // namespace lsmask
