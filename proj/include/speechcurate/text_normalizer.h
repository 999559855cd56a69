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

#ifndef SPEECHCURATE_TEXT_NORMALIZER_H_
#define SPEECHCURATE_TEXT_NORMALIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace speechcurate {

// Normalized lowercase word tokens. No token is empty or contains spaces.
using TokenSequence = std::vector<std::string>;

// English normalizer approximating the Whisper normalizer on a documented
// rule subset:
//   1. Unicode compatibility fold (NFKC); curly apostrophes become "'".
//   2. Lowercase.
//   3. Contractions: won't -> will not, can't -> cannot, n't -> not,
//      're -> are, 've -> have, 'll -> will, 'm -> am ('s is kept).
//   4. Hyphens and every character other than letters, digits and
//      intra-word apostrophes act as word separators.
//   5. Spelled-out cardinals (zero .. trillion, "twenty-one",
//      "one hundred and five") become digit strings.
// Numbers are read after separators are applied, so "twenty," and
// "twenty" normalize alike and the function is idempotent.
TokenSequence NormalizeText(std::string_view raw);

std::string JoinTokens(const TokenSequence& tokens);

// Splits already-normalized text on ASCII whitespace. Used for text that
// an external normalizer returned.
TokenSequence SplitWhitespace(std::string_view text);

}  // namespace speechcurate

#endif  // SPEECHCURATE_TEXT_NORMALIZER_H_
