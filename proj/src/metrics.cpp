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

#include "lsmask/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lsmask/error.hpp"
#include "lsmask/io.hpp"

namespace lsmask {

CalibrationReport ece(const std::vector<PredictionSample>& samples, std::size_t bins) {
  if (bins == 0) throw Error(Errc::ZeroBins, "bin count must be >= 1");
  if (samples.empty()) throw Error(Errc::EmptySamples, "no prediction samples");

  std::vector<double> conf_sum(bins, 0.0);
  std::vector<std::size_t> hits(bins, 0);
  CalibrationReport r;
  r.bins_count = bins;
  r.samples = samples.size();
  r.bins.resize(bins);
  const double m = static_cast<double>(bins);
  for (const auto& s : samples) {
    if (!(s.confidence >= 0.0 && s.confidence <= 1.0))
      throw Error(Errc::NonFiniteInput, "confidence " + format_double(s.confidence) + " outside [0, 1]");
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::floor(s.confidence * m)));
    ++r.bins[b].count;
    conf_sum[b] += s.confidence;
    if (s.correct) ++hits[b];
  }

  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < bins; ++i) {
    CalibrationBin& bin = r.bins[i];
    bin.lower = static_cast<double>(i) / m;
    bin.upper = static_cast<double>(i + 1) / m;
    if (bin.count == 0) continue;
    const double c = static_cast<double>(bin.count);
    bin.mean_confidence = conf_sum[i] / c;
    bin.accuracy = static_cast<double>(hits[i]) / c;
    r.ece += (c / n) * std::abs(bin.accuracy - bin.mean_confidence);
  }
  return r;
}

CalibrationReport reliability_table(const std::vector<PredictionSample>& samples, std::size_t bins) {
  return ece(samples, bins);
}

std::string format_calibration(const CalibrationReport& r) {
  std::ostringstream out;
  out << "M " << r.bins_count << '\n';
  out << "N " << r.samples << '\n';
  out << "ece " << format_double(r.ece) << '\n';
  out << "bin\tlower\tupper\tcount\tmean_confidence\taccuracy\n";
  for (std::size_t i = 0; i < r.bins.size(); ++i) {
    const auto& b = r.bins[i];
    out << i << '\t' << format_double(b.lower) << '\t' << format_double(b.upper) << '\t' << b.count << '\t'
        << format_double(b.mean_confidence) << '\t' << format_double(b.accuracy) << '\n';
  }
  return out.str();
}

namespace {

template <typename Seq>
std::map<Seq, std::size_t> ngram_counts(const Seq& seq, std::size_t n) {
  std::map<Seq, std::size_t> counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) ++counts[Seq(seq.begin() + i, seq.begin() + i + n)];
  return counts;
}

struct NgramStats {
  std::size_t hyp = 0;
  std::size_t ref = 0;
  std::size_t match = 0;
};

template <typename Seq>
NgramStats ngram_stats(const Seq& hyp, const Seq& ref, std::size_t n) {
  NgramStats s;
  const auto h = ngram_counts(hyp, n);
  const auto r = ngram_counts(ref, n);
  for (const auto& [g, c] : h) {
    s.hyp += c;
    if (auto it = r.find(g); it != r.end()) s.match += std::min(c, it->second);
  }
  for (const auto& kv : r) s.ref += kv.second;
  return s;
}

std::vector<std::string> code_points_without_space(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, s.size() - i);
    const bool space = len == 1 && (lead == ' ' || lead == '\t' || lead == '\n' || lead == '\r' || lead == '\f' ||
                                    lead == '\v');
    if (!space) out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace

double bleu(const std::vector<TokenSeq>& hypotheses, const std::vector<TokenSeq>& references, std::size_t max_n) {
  if (hypotheses.size() != references.size())
    throw Error(Errc::LengthMismatch, "hypothesis and reference counts differ");
  if (max_n == 0) throw Error(Errc::InvalidConfig, "max_n must be >= 1");
  std::vector<NgramStats> totals(max_n);
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    hyp_len += hypotheses[i].size();
    ref_len += references[i].size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      const NgramStats s = ngram_stats(hypotheses[i], references[i], n);
      totals[n - 1].hyp += s.hyp;
      totals[n - 1].match += s.match;
    }
  }
  if (hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  for (const auto& t : totals) {
    if (t.hyp == 0 || t.match == 0) return 0.0;
    log_sum += std::log(static_cast<double>(t.match) / static_cast<double>(t.hyp));
  }
  const double bp =
      hyp_len < ref_len ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)) : 1.0;
  return bp * std::exp(log_sum / static_cast<double>(max_n));
}

double chrf(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references, std::size_t max_n,
            double beta) {
  if (hypotheses.size() != references.size())
    throw Error(Errc::LengthMismatch, "hypothesis and reference counts differ");
  if (max_n == 0) throw Error(Errc::InvalidConfig, "max_n must be >= 1");
  std::vector<NgramStats> totals(max_n);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto h = code_points_without_space(hypotheses[i]);
    const auto r = code_points_without_space(references[i]);
    for (std::size_t n = 1; n <= max_n; ++n) {
      const NgramStats s = ngram_stats(h, r, n);
      totals[n - 1].hyp += s.hyp;
      totals[n - 1].ref += s.ref;
      totals[n - 1].match += s.match;
    }
  }
  double p_sum = 0.0;
  double r_sum = 0.0;
  std::size_t effective = 0;
  for (const auto& t : totals) {
    if (t.hyp == 0 || t.ref == 0) continue;
    ++effective;
    p_sum += static_cast<double>(t.match) / static_cast<double>(t.hyp);
    r_sum += static_cast<double>(t.match) / static_cast<double>(t.ref);
  }
  if (effective == 0) return 0.0;
  const double p = p_sum / static_cast<double>(effective);
  const double r = r_sum / static_cast<double>(effective);
  if (p + r == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

std::string detokenize(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace lsmask
