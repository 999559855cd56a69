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

#include "speechcurate/resample.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace speechcurate {
namespace {

double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

Resampler::Resampler(int in_rate_hz, int out_rate_hz, ResamplerOptions options) {
  if (in_rate_hz <= 0 || out_rate_hz <= 0)
    throw std::invalid_argument("Resampler: rates must be positive");
  const int g = std::gcd(in_rate_hz, out_rate_hz);
  up_ = out_rate_hz / g;
  down_ = in_rate_hz / g;
  if (up_ == down_) return;

  const double ratio = std::min(1.0, static_cast<double>(up_) / down_);
  const double fc = 0.5 * ratio * options.rolloff;  // cycles per input sample
  const double half_width = options.zero_crossings / ratio;
  const int k_half = static_cast<int>(std::ceil(half_width));
  taps_per_phase_ = 2 * k_half;
  left_ = k_half - 1;
  phases_.assign(static_cast<size_t>(up_) * taps_per_phase_, 0.0f);
  const double i0_beta = BesselI0(options.kaiser_beta);

  std::vector<double> taps(taps_per_phase_);
  for (int p = 0; p < up_; ++p) {
    const double frac = static_cast<double>(p) / up_;
    double sum = 0.0;
    for (int t = 0; t < taps_per_phase_; ++t) {
      const int k = t - left_;
      const double x = frac - k;  // distance from output instant to input j
      double h = 0.0;
      if (std::abs(x) < half_width) {
        const double arg = 2.0 * fc * x;
        const double sinc =
            arg == 0.0 ? 1.0 : std::sin(M_PI * arg) / (M_PI * arg);
        const double r = x / half_width;
        const double win =
            BesselI0(options.kaiser_beta * std::sqrt(1.0 - r * r)) / i0_beta;
        h = 2.0 * fc * sinc * win;
      }
      taps[t] = h;
      sum += h;
    }
    for (int t = 0; t < taps_per_phase_; ++t)
      phases_[static_cast<size_t>(p) * taps_per_phase_ + t] =
          static_cast<float>(taps[t] / sum);
  }
}

std::vector<float> Resampler::Process(std::span<const float> input) const {
  if (up_ == down_) return std::vector<float>(input.begin(), input.end());
  const int64_t n_in = static_cast<int64_t>(input.size());
  const int64_t n_out = n_in * up_ / down_;
  std::vector<float> out(static_cast<size_t>(n_out));
  for (int64_t n = 0; n < n_out; ++n) {
    const int64_t pos = n * down_;
    const int64_t base = pos / up_;
    const int phase = static_cast<int>(pos % up_);
    const float* h = &phases_[static_cast<size_t>(phase) * taps_per_phase_];
    const int64_t j0 = base - left_;
    double acc = 0.0;
    int t0 = 0, t1 = taps_per_phase_;
    if (j0 < 0) t0 = static_cast<int>(-j0);
    if (j0 + t1 > n_in) t1 = static_cast<int>(n_in - j0);
    for (int t = t0; t < t1; ++t) acc += static_cast<double>(h[t]) * input[j0 + t];
    out[static_cast<size_t>(n)] = static_cast<float>(acc);
  }
  return out;
}

std::vector<float> Resample(std::span<const float> input, int in_rate_hz,
                            int out_rate_hz) {
  return Resampler(in_rate_hz, out_rate_hz).Process(input);
}

}  // namespace speechcurate
