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

#ifndef SPEECHCURATE_RESAMPLE_H_
#define SPEECHCURATE_RESAMPLE_H_

#include <span>
#include <vector>

namespace speechcurate {

struct ResamplerOptions {
  // Zero crossings of the sinc on each side, measured at the lower rate.
  int zero_crossings = 32;
  // Passband edge as a fraction of the lower Nyquist frequency.
  double rolloff = 0.92;
  double kaiser_beta = 9.0;
};

/// Rational-ratio polyphase resampler with a Kaiser-windowed sinc kernel.
/// The defaults give well over 60 dB of stopband attenuation. Output length
/// is floor(n * out_rate / in_rate) samples.
class Resampler {
 public:
  Resampler(int in_rate_hz, int out_rate_hz, ResamplerOptions options = {});

  std::vector<float> Process(std::span<const float> input) const;

  int up() const { return up_; }
  int down() const { return down_; }

 private:
  int up_ = 1;
  int down_ = 1;
  int taps_per_phase_ = 0;
  int left_ = 0;  // taps before the centre sample
  // phases_[p * taps_per_phase_ + k]
  std::vector<float> phases_;
};

std::vector<float> Resample(std::span<const float> input, int in_rate_hz,
                            int out_rate_hz);

}  // namespace speechcurate

#endif  // SPEECHCURATE_RESAMPLE_H_
