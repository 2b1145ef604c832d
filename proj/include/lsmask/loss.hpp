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

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lsmask/error.hpp"
#include "lsmask/smoothing.hpp"
#include "lsmask/types.hpp"

namespace lsmask {

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& z) {
  if (!z.allFinite()) throw Error(Errc::NonFiniteInput, "logits contain NaN or infinity");
}

template <typename Derived>
void require_length(const LabelDistribution& target, const Eigen::MatrixBase<Derived>& z) {
  if (target.probs.size() != z.size())
    throw Error(Errc::LengthMismatch,
                "target has " + std::to_string(target.probs.size()) + " entries, logits " + std::to_string(z.size()));
}

}  // namespace detail

/// Max-shifted softmax of a logit vector (row or column).
template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(z);
  const Scalar shift = z.maxCoeff();
  Vector<Scalar> e = (z.derived().reshaped().array() - shift).exp().matrix();
  return e / e.sum();
}

template <typename Derived>
Vector<typename Derived::Scalar> log_softmax(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(z);
  const Scalar shift = z.maxCoeff();
  const auto shifted = z.derived().reshaped().array() - shift;
  const Scalar log_norm = std::log(shifted.exp().sum());
  return (shifted - log_norm).matrix();
}

/// Row-wise softmax of a matrix whose rows are logit vectors.
template <typename Derived>
Matrix<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(z);
  Matrix<Scalar> out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const Scalar shift = z.row(r).maxCoeff();
    out.row(r) = (z.row(r).array() - shift).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

struct PositionLoss {
  double soft_ce = 0.0;   // cross-entropy against the (smoothed) target
  double gold_nll = 0.0;  // -log p(gold)
};

/// Entries with zero target mass contribute exactly 0; their log-probability
/// is never read.
template <typename Derived>
PositionLoss cross_entropy(const LabelDistribution& target, const Eigen::MatrixBase<Derived>& z) {
  detail::require_length(target, z);
  const Vec logp = log_softmax(z.template cast<double>());
  PositionLoss loss;
  for (Eigen::Index i = 0; i < logp.size(); ++i) {
    const double t = target.probs[i];
    if (t != 0.0) loss.soft_ce -= t * logp[i];
  }
  loss.gold_nll = -logp[target.correct_id];
  return loss;
}

/// d soft_ce / d z = softmax(z) - target.
template <typename Derived>
Vec grad_logits(const LabelDistribution& target, const Eigen::MatrixBase<Derived>& z) {
  detail::require_length(target, z);
  return softmax(z.template cast<double>()) - target.probs;
}

struct SequenceLoss {
  double mean_soft_ce = 0.0;
  double mean_gold_nll = 0.0;
  std::size_t token_count = 0;
};

/// Means over positions whose pad flag is false, summed left to right.
SequenceLoss sequence_loss(const std::vector<LabelDistribution>& targets, const std::vector<Vec>& logits,
                           const std::vector<bool>& pad_mask);

/// exp(mean gold NLL); throws NegativeInput below zero.
double perplexity(double mean_gold_nll);

/// Shannon entropy in nats, zero entries skipped.
double entropy(const Vec& probs);

}  // namespace lsmask
