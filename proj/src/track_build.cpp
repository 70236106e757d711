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

#include "tempo/track_build.hpp"

#include <algorithm>
#include <numeric>

#include "tempo/errors.hpp"
#include "tempo/rng.hpp"

namespace tempo {

void validate(const Tokenization& tok, std::size_t text_length) {
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < tok.tokens.size(); ++i) {
    const auto& t = tok.tokens[i];
    if (t.char_begin != cursor || t.char_end < t.char_begin)
      throw DomainError("tokenization does not tile the text at token " + std::to_string(i));
    cursor = t.char_end;
  }
  if (cursor != text_length) throw DomainError("tokenization does not cover the whole text");
}

Tokenization char_tokenization(std::u32string_view normalized) {
  Tokenization tok;
  for (std::size_t i = 0; i < normalized.size(); ++i)
    tok.tokens.push_back(AxisToken{static_cast<TokenId>(normalized[i]), i, i + 1});
  return tok;
}

std::vector<Frames> largest_remainder_split(Frames total, const std::vector<std::size_t>& weights) {
  std::vector<Frames> out(weights.size(), 0);
  const std::size_t wsum = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  if (wsum == 0 || total <= 0) return out;
  std::vector<std::pair<Frames, std::size_t>> rem;  // (remainder numerator, index)
  Frames assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const Frames num = total * static_cast<Frames>(weights[i]);
    out[i] = num / static_cast<Frames>(wsum);
    assigned += out[i];
    rem.emplace_back(num % static_cast<Frames>(wsum), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (Frames k = 0; k < total - assigned; ++k) ++out[rem[static_cast<std::size_t>(k)].second];
  return out;
}

TimingTrack build_track(const std::vector<AxisSpan>& words, const Tokenization& tok, FrameRate rate,
                        const BuildOptions& opts) {
  TimingTrack track;
  track.rate = rate;
  const std::size_t n = tok.tokens.size();
  track.tokens.reserve(n);
  for (const auto& t : tok.tokens) track.tokens.push_back(t.id);
  track.timings.assign(n, TokenTiming{});

  // owner[i]: the single word whose chars token i overlaps, if any.
  std::vector<std::optional<std::size_t>> owner(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = tok.tokens[i];
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto& s = words[w];
      if (std::max(t.char_begin, s.char_begin) >= std::min(t.char_end, s.char_end)) continue;
      if (owner[i])
        throw TrackBuildError("token " + std::to_string(i) + " straddles words " +
                              std::to_string(*owner[i]) + " and " + std::to_string(w));
      owner[i] = w;
    }
  }

  std::vector<Frames> start_f(words.size()), end_f(words.size());
  for (std::size_t w = 0; w < words.size(); ++w) {
    start_f[w] = seconds_to_frames(words[w].start_s, rate);
    end_f[w] = std::max(start_f[w], seconds_to_frames(words[w].end_s, rate));
  }

  for (std::size_t w = 0; w < words.size(); ++w) {
    std::vector<std::size_t> members, weights;
    for (std::size_t i = 0; i < n; ++i) {
      if (owner[i] != w) continue;
      const auto& t = tok.tokens[i];
      members.push_back(i);
      weights.push_back(std::min(t.char_end, words[w].char_end) - std::max(t.char_begin, words[w].char_begin));
    }
    if (members.empty()) continue;
    const auto split = largest_remainder_split(end_f[w] - start_f[w], weights);
    for (std::size_t k = 0; k < members.size(); ++k) track.timings[members[k]].content = split[k];

    Frames gap = 0;
    if (w + 1 < words.size()) {
      gap = start_f[w + 1] - end_f[w];
    } else if (opts.assign_final_silence && opts.end_of_audio_s) {
      gap = seconds_to_frames(*opts.end_of_audio_s, rate) - end_f[w];
    }
    track.timings[members.back()].pause = std::max<Frames>(0, gap);
  }
  return track;
}

bool dropout_decision(const DropoutPolicy& policy, std::string_view utterance_id) {
  if (policy.drop_prob <= 0.0) return false;
  if (policy.drop_prob >= 1.0) return true;
  return key_uniform(stream_key(policy.seed, utterance_id)) < policy.drop_prob;
}

TimingTrack mask_all(const TimingTrack& track) {
  TimingTrack out = track;
  for (auto& t : out.timings) t = TokenTiming{0, 0, false, false};
  return out;
}

TimingTrack apply_dropout(const TimingTrack& track, const DropoutPolicy& policy,
                          std::string_view utterance_id) {
  return dropout_decision(policy, utterance_id) ? mask_all(track) : track;
}

TimingTrack mask_prompt_region(const TimingTrack& track, std::size_t prompt_len) {
  if (prompt_len > track.size())
    throw DomainError("prompt length " + std::to_string(prompt_len) + " exceeds track length " +
                      std::to_string(track.size()));
  TimingTrack out = track;
  for (std::size_t i = 0; i < prompt_len; ++i) out.timings[i] = TokenTiming{0, 0, false, false};
  return out;
}

}  // namespace tempo
