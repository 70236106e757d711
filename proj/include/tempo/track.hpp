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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tempo {

/// Acoustic frame clock. 24 kHz audio with hop 256 gives the default.
class FrameRate {
 public:
  static constexpr double kDefaultFps = 93.75;

  FrameRate() = default;
  explicit FrameRate(double frames_per_second);

  double fps() const { return fps_; }
  double period_ms() const { return 1000.0 / fps_; }

  friend bool operator==(const FrameRate&, const FrameRate&) = default;

 private:
  double fps_ = kDefaultFps;
};

/// Log-compression factor for frame counts fed to the timing encoders.
class LogScale {
 public:
  LogScale() = default;
  explicit LogScale(double s);
  double value() const { return s_; }

 private:
  double s_ = 1.0;
};

using Frames = std::int64_t;
using TokenId = std::int32_t;

/// Content duration and trailing pause of one token, in frames.
/// A cleared mask means the control is absent; its value is stored as 0.
struct TokenTiming {
  Frames content = 0;
  Frames pause = 0;
  bool content_mask = true;
  bool pause_mask = true;

  friend bool operator==(const TokenTiming&, const TokenTiming&) = default;
};

struct TimingTrack {
  std::vector<TokenId> tokens;
  std::vector<TokenTiming> timings;
  FrameRate rate;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  /// True when at least one control (content or pause) is present.
  bool any_available() const;
  /// True when every content and pause control is present.
  bool fully_available() const;

  friend bool operator==(const TimingTrack&, const TimingTrack&) = default;
};

/// Throws DomainError when the track violates its invariants.
void validate(const TimingTrack& track);

/// Half-up rounding of ms * fps / 1000.
Frames ms_to_frames(double ms, FrameRate rate);
Frames seconds_to_frames(double seconds, FrameRate rate);
double frames_to_ms(double frames, FrameRate rate);

/// log(1 + s * v); zero exactly when v == 0.
double log_compress(Frames v, LogScale scale);

/// Sum of content and pause frames over all tokens.
Frames track_total_span(const TimingTrack& track);

/// Line format: `#fps=<real>` header, then `token_id\td\tp\tm_d\tm_p` per token.
std::string serialize_track(const TimingTrack& track);
TimingTrack deserialize_track(std::string_view text);

TimingTrack read_track_file(const std::string& path);
void write_track_file(const std::string& path, const TimingTrack& track);

/// Shortest decimal that reads back to the same double.
std::string format_real(double v);
double parse_real(std::string_view s);

}  // namespace tempo
