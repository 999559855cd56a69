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

#include "speechcurate/text_normalizer.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <cstdint>
#include <optional>
#include <unordered_map>

namespace speechcurate {
namespace {

bool IsWordChar(UChar32 c) { return u_isalpha(c) || u_isdigit(c); }

UChar32 FoldApostrophe(UChar32 c) {
  switch (c) {
    case 0x2018:  // left single quotation mark
    case 0x2019:  // right single quotation mark
    case 0x02BC:  // modifier letter apostrophe
    case 0x2032:  // prime
      return '\'';
    default:
      return c;
  }
}

std::string ToUtf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

// Steps 1-2: compatibility fold and lowercase, as UTF-32.
std::u32string FoldAndLower(std::string_view raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString folded;
  if (U_SUCCESS(status)) {
    folded = nfkc->normalize(src, status);
  }
  if (U_FAILURE(status)) folded = src;
  folded.toLower(icu::Locale::getRoot());
  std::u32string out;
  out.reserve(folded.length());
  for (int32_t i = 0; i < folded.length();) {
    UChar32 c = folded.char32At(i);
    out.push_back(static_cast<char32_t>(FoldApostrophe(c)));
    i += U16_LENGTH(c);
  }
  return out;
}

// Word runs: letters/digits joined by single apostrophes that have a word
// character on both sides. Everything else separates.
std::vector<std::string> WordRuns(const std::u32string& text) {
  std::vector<std::string> runs;
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) runs.push_back(ToUtf8(cur));
    cur.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char32_t c = text[i];
    if (IsWordChar(static_cast<UChar32>(c))) {
      cur.push_back(c);
    } else if (c == U'\'' && !cur.empty() && i + 1 < text.size() &&
               IsWordChar(static_cast<UChar32>(text[i + 1]))) {
      cur.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return runs;
}

bool EndsWith(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void ExpandContraction(const std::string& word, std::vector<std::string>* out) {
  if (word == "won't") {
    out->push_back("will");
    out->push_back("not");
    return;
  }
  if (word == "can't") {
    out->push_back("cannot");
    return;
  }
  struct Suffix {
    std::string_view suffix;
    const char* expansion;
  };
  static constexpr Suffix kSuffixes[] = {
      {"n't", "not"}, {"'re", "are"}, {"'ve", "have"},
      {"'ll", "will"}, {"'m", "am"},
  };
  for (const auto& s : kSuffixes) {
    if (EndsWith(word, s.suffix)) {
      std::string stem = word.substr(0, word.size() - s.suffix.size());
      if (!stem.empty()) out->push_back(stem);
      out->push_back(s.expansion);
      return;
    }
  }
  out->push_back(word);
}

enum class NumKind { kZero, kUnit, kTeen, kTens, kHundred, kScale, kAnd };

struct NumWord {
  NumKind kind;
  int64_t value;
};

std::optional<NumWord> LookupNumber(const std::string& w) {
  static const std::unordered_map<std::string, NumWord> kTable = [] {
    std::unordered_map<std::string, NumWord> t;
    t["zero"] = {NumKind::kZero, 0};
    const char* units[] = {"one", "two", "three", "four", "five",
                           "six", "seven", "eight", "nine"};
    for (int i = 0; i < 9; ++i) t[units[i]] = {NumKind::kUnit, i + 1};
    const char* teens[] = {"ten",     "eleven",  "twelve",    "thirteen",
                           "fourteen", "fifteen", "sixteen",  "seventeen",
                           "eighteen", "nineteen"};
    for (int i = 0; i < 10; ++i) t[teens[i]] = {NumKind::kTeen, i + 10};
    const char* tens[] = {"twenty", "thirty",  "forty",  "fifty",
                          "sixty",  "seventy", "eighty", "ninety"};
    for (int i = 0; i < 8; ++i) t[tens[i]] = {NumKind::kTens, (i + 2) * 10};
    t["hundred"] = {NumKind::kHundred, 100};
    t["thousand"] = {NumKind::kScale, 1000LL};
    t["million"] = {NumKind::kScale, 1000000LL};
    t["billion"] = {NumKind::kScale, 1000000000LL};
    t["trillion"] = {NumKind::kScale, 1000000000000LL};
    t["and"] = {NumKind::kAnd, 0};
    return t;
  }();
  auto it = kTable.find(w);
  if (it == kTable.end()) return std::nullopt;
  return it->second;
}

bool StartsSmallGroup(const std::optional<NumWord>& w) {
  return w && (w->kind == NumKind::kUnit || w->kind == NumKind::kTeen ||
               w->kind == NumKind::kTens);
}

// Rewrites runs of cardinal number words into digit strings.
TokenSequence ConvertCardinals(const std::vector<std::string>& words) {
  TokenSequence out;
  size_t i = 0;
  while (i < words.size()) {
    auto first = LookupNumber(words[i]);
    if (!first || first->kind == NumKind::kAnd) {
      out.push_back(words[i]);
      ++i;
      continue;
    }
    enum class Last { kNone, kZero, kUnit, kTeen, kTens, kHundred, kScale };
    Last last = Last::kNone;
    int64_t total = 0;
    int64_t group = 0;
    int64_t last_scale = INT64_MAX;
    size_t j = i;
    for (; j < words.size(); ++j) {
      auto w = LookupNumber(words[j]);
      if (!w) break;
      bool accept = false;
      switch (w->kind) {
        case NumKind::kZero:
          if (last == Last::kNone) {
            last = Last::kZero;
            accept = true;
          }
          break;
        case NumKind::kUnit:
          if (last == Last::kNone || last == Last::kTens ||
              last == Last::kHundred || last == Last::kScale) {
            group += w->value;
            last = Last::kUnit;
            accept = true;
          }
          break;
        case NumKind::kTeen:
        case NumKind::kTens:
          if (last == Last::kNone || last == Last::kHundred ||
              last == Last::kScale) {
            group += w->value;
            last = w->kind == NumKind::kTeen ? Last::kTeen : Last::kTens;
            accept = true;
          }
          break;
        case NumKind::kHundred:
          if (last == Last::kNone) {
            group = 100;
            last = Last::kHundred;
            accept = true;
          } else if ((last == Last::kUnit || last == Last::kTeen) &&
                     group < 100) {
            group *= 100;
            last = Last::kHundred;
            accept = true;
          }
          break;
        case NumKind::kScale:
          if (w->value < last_scale &&
              (last == Last::kNone || last == Last::kUnit ||
               last == Last::kTeen || last == Last::kTens ||
               last == Last::kHundred)) {
            if (last == Last::kNone) group = 1;
            total += group * w->value;
            group = 0;
            last_scale = w->value;
            last = Last::kScale;
            accept = true;
          }
          break;
        case NumKind::kAnd:
          // "one hundred and five": only inside a number, before a
          // small-group word.
          if ((last == Last::kHundred || last == Last::kScale) &&
              j + 1 < words.size() && StartsSmallGroup(LookupNumber(words[j + 1]))) {
            accept = true;
          }
          break;
      }
      if (!accept) break;
    }
    out.push_back(std::to_string(total + group));
    i = j;
  }
  return out;
}

}  // namespace

TokenSequence NormalizeText(std::string_view raw) {
  std::u32string folded = FoldAndLower(raw);
  std::vector<std::string> words;
  for (const auto& run : WordRuns(folded)) ExpandContraction(run, &words);
  return ConvertCardinals(words);
}

std::string JoinTokens(const TokenSequence& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenSequence SplitWhitespace(std::string_view text) {
  TokenSequence out;
  size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace speechcurate
