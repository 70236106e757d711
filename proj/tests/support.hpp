// Copyright 2026 The Tempo Authors
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

// Random generators and brute-force reference implementations shared by the
// property tests. Oracles here deliberately avoid the library's code paths.

#include <cmath>
#include <random>
#include <vector>

#include "tempo/rng.hpp"
#include "tempo/track.hpp"

namespace tempo::testing {

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return uniform_real(rng, 0.0, 1.0) < p; }

/// A valid track: masked entries store zeros.
inline TimingTrack random_track(Rng& rng, int max_tokens = 12, int vocab = 16, double mask_prob = 0.2,
                                FrameRate rate = {}) {
  TimingTrack t;
  t.rate = rate;
  const int n = uniform_int(rng, 0, max_tokens);
  for (int i = 0; i < n; ++i) {
    t.tokens.push_back(uniform_int(rng, 0, vocab - 1));
    TokenTiming tt;
    tt.content_mask = !coin(rng, mask_prob);
    tt.pause_mask = !coin(rng, mask_prob);
    tt.content = tt.content_mask ? uniform_int(rng, 0, 40) : 0;
    tt.pause = tt.pause_mask && coin(rng, 0.4) ? uniform_int(rng, 0, 40) : 0;
    t.timings.push_back(tt);
  }
  return t;
}

/// A track the toy world can realize unambiguously: every token has content
/// and adjacent tokens differ.
inline TimingTrack random_world_track(Rng& rng, int vocab = 16, int max_tokens = 12, Frames max_content = 25,
                                      Frames max_pause = 30) {
  TimingTrack t;
  const int n = uniform_int(rng, 1, max_tokens);
  for (int i = 0; i < n; ++i) {
    TokenId id = uniform_int(rng, 0, vocab - 1);
    while (vocab > 1 && !t.tokens.empty() && id == t.tokens.back()) id = uniform_int(rng, 0, vocab - 1);
    t.tokens.push_back(id);
    TokenTiming tt;
    tt.content = uniform_int(rng, 1, int(max_content));
    tt.pause = coin(rng, 0.4) ? uniform_int(rng, 1, int(max_pause)) : 0;
    t.timings.push_back(tt);
  }
  return t;
}

/// Two-pass textbook Pearson correlation.
inline double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace tempo::testing
