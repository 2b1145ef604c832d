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

#include "lsmask/error.hpp"

namespace lsmask {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateToken: return "DuplicateToken";
    case Errc::EmptyVocabulary: return "EmptyVocabulary";
    case Errc::OrphanToken: return "OrphanToken";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::InvalidBetas: return "InvalidBetas";
    case Errc::EmptyClassWithMass: return "EmptyClassWithMass";
    case Errc::NoLegalTargets: return "NoLegalTargets";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::AllPadded: return "AllPadded";
    case Errc::NegativeInput: return "NegativeInput";
    case Errc::EmptySamples: return "EmptySamples";
    case Errc::ZeroBins: return "ZeroBins";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DivergedLoss: return "DivergedLoss";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace lsmask
