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

#include "doctest.h"
#include "speechcurate/text_normalizer.h"
#include "speechcurate/util.h"
#include "speechcurate/wer.h"
#include "test_support.h"

using namespace speechcurate;

namespace {

TokenSequence RandomTokens(Rng& rng, size_t max_len, size_t alphabet) {
  TokenSequence t(rng.UniformIndex(max_len + 1));
  for (auto& w : t) w = std::string(1, static_cast<char>('a' + rng.UniformIndex(alphabet)));
  return t;
}

}  // namespace

TEST_SUITE("text") {

TEST_CASE("normalizer folds case, punctuation and contractions") {
  CHECK(JoinTokens(NormalizeText("Hello, World!")) == "hello world");
  CHECK(JoinTokens(NormalizeText("I can't  go; won't GO")) == "i cannot go will not go");
  CHECK(JoinTokens(NormalizeText("they're here, we've been")) == "they are here we have been");
  CHECK(JoinTokens(NormalizeText("don\xe2\x80\x99t")) == "do not");
  CHECK(JoinTokens(NormalizeText("John's well-known")) == "john's well known");
  CHECK(JoinTokens(NormalizeText("\xef\xbc\xa1\xef\xbc\xa2")) == "ab");  // full-width
  CHECK(NormalizeText("  ...  ").empty());
}

TEST_CASE("spelled cardinals become digits") {
  CHECK(JoinTokens(NormalizeText("twenty-one apples")) == "21 apples");
  CHECK(JoinTokens(NormalizeText("one hundred and five")) == "105");
  CHECK(JoinTokens(NormalizeText("two thousand twenty four")) == "2024");
  CHECK(JoinTokens(NormalizeText("three million four hundred")) == "3000400");
  CHECK(JoinTokens(NormalizeText("zero")) == "0");
  CHECK(JoinTokens(NormalizeText("bread and butter")) == "bread and butter");
  CHECK(JoinTokens(NormalizeText("twenty, thirty")) == JoinTokens(NormalizeText("twenty thirty")));
}

TEST_CASE("normalizer is idempotent") {
  const char* samples[] = {"It's twenty-one o'clock, isn't it?", "WE'LL see... 'quoted' text",
                           "one hundred and twenty three thousand", "Mixed CASE and-hyphens",
                           "caf\xc3\xa9 na\xc3\xafve"};
  for (const char* s : samples) {
    const std::string once = JoinTokens(NormalizeText(s));
    CHECK(JoinTokens(NormalizeText(once)) == once);
  }
}

TEST_CASE("tokens never contain spaces or are empty") {
  Rng rng(5);
  const std::string alphabet = "ab -,'.AB9";
  for (int i = 0; i < 300; ++i) {
    std::string s;
    for (uint64_t k = rng.UniformIndex(30); k > 0; --k)
      s += alphabet[rng.UniformIndex(alphabet.size())];
    for (const auto& t : NormalizeText(s)) {
      CHECK(!t.empty());
      CHECK(t.find(' ') == std::string::npos);
    }
  }
}

TEST_CASE("wer counts and tie-break are deterministic") {
  WerResult r = WordErrorRate({"a", "b", "c"}, {"a", "x", "c", "d"});
  CHECK(r.counts.substitutions == 1);
  CHECK(r.counts.insertions == 1);
  CHECK(r.counts.deletions == 0);
  CHECK(r.rate == doctest::Approx(2.0 / 3.0));
  CHECK(WordErrorRate({"a"}, {}).rate == 1.0);
  CHECK(WordErrorRate({"a"}, {"b", "c", "d"}).rate == 3.0);
  CHECK_THROWS_AS(WordErrorRate({}, {"a"}), UndefinedRateError);
  CHECK(WerOfStrings("Hello, world", "hello world") == 0.0);
}

TEST_CASE("wer matches the edit distance oracle") {
  Rng rng(2024);
  for (int i = 0; i < 2000; ++i) {
    TokenSequence ref = RandomTokens(rng, 12, 4);
    TokenSequence hyp = RandomTokens(rng, 12, 4);
    if (ref.empty()) ref.push_back("a");
    WerResult r = WordErrorRate(ref, hyp);
    const int64_t d = testing::EditDistanceOracle(ref, hyp);
    CHECK(r.counts.errors() == d);
    CHECK(r.counts.reference_length == static_cast<int64_t>(ref.size()));
    // Counts must describe a consistent alignment.
    CHECK(static_cast<int64_t>(hyp.size()) ==
          static_cast<int64_t>(ref.size()) - r.counts.deletions + r.counts.insertions);
  }
}

TEST_CASE("wer properties") {
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    TokenSequence ref = RandomTokens(rng, 10, 5);
    if (ref.empty()) ref.push_back("e");
    CHECK(WordErrorRate(ref, ref).rate == 0.0);
    TokenSequence hyp = RandomTokens(rng, 10, 5);
    CHECK(WordErrorRate(ref, hyp).rate >= 0.0);
    // Appending one word changes the distance by at most one.
    TokenSequence longer = hyp;
    longer.push_back("z");
    const auto a = WordErrorRate(ref, hyp).counts.errors();
    const auto b = WordErrorRate(ref, longer).counts.errors();
    CHECK(std::abs(a - b) <= 1);
  }
}

}  // TEST_SUITE
