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

#include "speechcurate/wer.h"

#include <algorithm>
#include <vector>

namespace speechcurate {

WerResult WordErrorRate(const TokenSequence& ref, const TokenSequence& hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  if (n == 0) throw UndefinedRateError("WER undefined for an empty reference");

  // cost[i][j]: edits to turn ref[0, i) into hyp[0, j).
  const size_t w = m + 1;
  std::vector<int32_t> cost((n + 1) * w);
  for (size_t j = 0; j <= m; ++j) cost[j] = static_cast<int32_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cost[i * w] = static_cast<int32_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      int32_t diag = cost[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int32_t ins = cost[i * w + j - 1] + 1;
      int32_t del = cost[(i - 1) * w + j] + 1;
      cost[i * w + j] = std::min({diag, ins, del});
    }
  }

  EditCounts counts;
  counts.reference_length = static_cast<int64_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int32_t here = cost[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (cost[(i - 1) * w + j - 1] + (same ? 0 : 1) == here) {
        if (!same) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[i * w + j - 1] + 1 == here) {
      ++counts.insertions;
      --j;
      continue;
    }
    ++counts.deletions;
    --i;
  }

  WerResult result;
  result.counts = counts;
  result.rate = static_cast<double>(counts.errors()) / static_cast<double>(n);
  return result;
}

double WerOfStrings(std::string_view ref_raw, std::string_view hyp_raw) {
  TokenSequence ref = NormalizeText(ref_raw);
  if (ref.empty())
    throw UndefinedRateError("reference normalizes to an empty sequence");
  return WordErrorRate(ref, NormalizeText(hyp_raw)).rate;
}

}  // namespace speechcurate
