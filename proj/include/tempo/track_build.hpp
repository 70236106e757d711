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
#include <optional>
#include <string_view>
#include <vector>

#include "tempo/align.hpp"
#include "tempo/track.hpp"

namespace tempo {

/// One model token and the normalized-axis characters it covers.
struct AxisToken {
  TokenId id = 0;
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
};

/// Tokens tile the normalized text: contiguous, ordered, non-overlapping.
struct Tokenization {
  std::vector<AxisToken> tokens;
};

void validate(const Tokenization& tok, std::size_t text_length);

/// One token per normalized character; ids are code points.
Tokenization char_tokenization(std::u32string_view normalized);

struct BuildOptions {
  /// Assign silence after the last word (up to end_of_audio_s) to the last
  /// token's pause.
  bool assign_final_silence = true;
  std::optional<double> end_of_audio_s;
};

class TrackBuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projects word spans onto tokens. Word boundaries are quantized to frames
/// first, so token durations tile each word and gaps become trailing pauses
/// of the word's last token. Leading silence is discarded.
TimingTrack build_track(const std::vector<AxisSpan>& words, const Tokenization& tok, FrameRate rate,
                        const BuildOptions& opts = {});

/// Splits `total` into integers proportional to `weights` that sum to
/// `total` exactly (largest remainder, ties to the earlier entry).
std::vector<Frames> largest_remainder_split(Frames total, const std::vector<std::size_t>& weights);

struct DropoutPolicy {
  double drop_prob = 0.2;
  std::uint64_t seed = 0;
};

/// Whole-track dropout decision, deterministic in (seed, utterance_id).
bool dropout_decision(const DropoutPolicy& policy, std::string_view utterance_id);

/// Returns the track with every mask cleared (and value zeroed) when the
/// utterance is selected for dropout, the input otherwise.
TimingTrack apply_dropout(const TimingTrack& track, const DropoutPolicy& policy,
                          std::string_view utterance_id);

/// Clears both controls of every token.
TimingTrack mask_all(const TimingTrack& track);

/// Clears both controls of the first `prompt_len` tokens.
TimingTrack mask_prompt_region(const TimingTrack& track, std::size_t prompt_len);

}  // namespace tempo
