// Copyright 2026 The speechcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPEECHCURATE_WER_H_
#define SPEECHCURATE_WER_H_

#include <cstdint>
#include <string_view>

#include "speechcurate/text_normalizer.h"
#include "speechcurate/util.h"

namespace speechcurate {

struct EditCounts {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t reference_length = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }
  bool operator==(const EditCounts&) const = default;
};

struct WerResult {
  double rate = 0.0;  // ratio, not percent
  EditCounts counts;
};

// Thrown when the reference is empty and the rate is undefined.
class UndefinedRateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Minimal unit-cost word alignment. When several alignments reach the same
// cost the backtrace prefers substitution (or match), then insertion, then
// deletion, so the counts are deterministic.
WerResult WordErrorRate(const TokenSequence& reference,
                        const TokenSequence& hypothesis);

// WordErrorRate(NormalizeText(ref), NormalizeText(hyp)).rate
double WerOfStrings(std::string_view ref_raw, std::string_view hyp_raw);

}  // namespace speechcurate

#endif  // SPEECHCURATE_WER_H_
