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

#ifndef SPEECHCURATE_UTIL_H_
#define SPEECHCURATE_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace speechcurate {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text: manifest lines, config files, wire replies.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad or unusable configuration (including missing codecs).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Deterministic PRNG. std::uniform_int_distribution is implementation
// defined, so bounded draws are done here to keep outputs identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  uint64_t UniformIndex(uint64_t bound);

  // Uniform real in [0, 1).
  double UniformReal() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>* values) {
    for (size_t i = values->size(); i > 1; --i) {
      size_t j = UniformIndex(i);
      std::swap((*values)[i - 1], (*values)[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

uint64_t Fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

// Seed for an independent sub-stream, e.g. one per dataset.
uint64_t DeriveSeed(uint64_t seed, std::string_view label);

std::string HexDigest(uint64_t value);

// Seconds rounded to the nearest millisecond.
double RoundToMillis(double seconds);
int64_t ToMillis(double seconds);

std::string FormatFixed(double value, int decimals);

// Atomic replace: writes to a sibling temp file, then renames.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view text);
std::string ReadFile(const std::filesystem::path& path);

std::vector<std::string> SplitLines(std::string_view text);

// Number of Unicode code points in `text` that are not ASCII whitespace.
size_t CountNonSpaceCodepoints(std::string_view text);

}  // namespace speechcurate

#endif  // SPEECHCURATE_UTIL_H_
