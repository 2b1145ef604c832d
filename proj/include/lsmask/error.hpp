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

#include <stdexcept>
#include <string>
#include <string_view>

namespace lsmask {

enum class Errc {
  DuplicateToken,
  EmptyVocabulary,
  OrphanToken,
  MalformedRow,
  UnknownCategory,
  IndexOutOfRange,
  AlphaOutOfRange,
  InvalidBetas,
  EmptyClassWithMass,
  NoLegalTargets,
  NonFiniteInput,
  LengthMismatch,
  AllPadded,
  NegativeInput,
  EmptySamples,
  ZeroBins,
  InvalidSpec,
  InvalidConfig,
  DivergedLoss,
  EmptyCorpus,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-readable error kind. what() starts with the
/// kind name so command-line diagnostics can be matched on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace lsmask
