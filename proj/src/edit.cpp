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

#include "tempo/edit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "tempo/errors.hpp"
#include "tempo/rng.hpp"

namespace tempo {

TimingTrack uniform_baseline(const std::vector<TokenId>& tokens, const std::vector<bool>& is_punct,
                             double content_ms, double punct_ms, FrameRate rate) {
  if (tokens.size() != is_punct.size()) throw DomainError("uniform_baseline: punctuation flags do not match tokens");
  const Frames content = ms_to_frames(content_ms, rate);
  const Frames punct = ms_to_frames(punct_ms, rate);
  TimingTrack track;
  track.rate = rate;
  track.tokens = tokens;
  for (bool p : is_punct) track.timings.push_back(TokenTiming{p ? punct : content, 0, true, true});
  return track;
}

TimingTrack apply_edit(const TimingTrack& track, const EditSpec& spec) {
  const std::size_t n = track.size();
  if (spec.kind == EditKind::pause_set) {
    if (spec.begin >= n) throw DomainError("apply_edit: pause position out of range");
  } else if (spec.begin >= spec.end || spec.end > n) {
    throw DomainError("apply_edit: content span out of range");
  }
  TimingTrack out = track;
  switch (spec.kind) {
    case EditKind::pause_set: {
      auto& t = out.timings[spec.begin];
      t.pause = ms_to_frames(spec.value, track.rate);
      t.pause_mask = true;
      break;
    }
    case EditKind::content_scale: {
      if (!(spec.value > 0.0)) throw DomainError("apply_edit: scale factor must be positive");
      for (std::size_t i = spec.begin; i < spec.end; ++i) {
        auto& t = out.timings[i];
        t.content = static_cast<Frames>(std::floor(spec.value * double(t.content) + 0.5));
      }
      break;
    }
    case EditKind::content_set: {
      const Frames f = ms_to_frames(spec.value, track.rate);
      for (std::size_t i = spec.begin; i < spec.end; ++i) {
        out.timings[i].content = f;
        out.timings[i].content_mask = true;
      }
      break;
    }
  }
  return out;
}

std::vector<ScenarioCase> scenario_suite(const ScenarioOptions& opts) {
  struct Fixture {
    const char* name;
    const char* surface;
    std::vector<TokenId> tokens;
    std::vector<bool> punct;
    std::vector<std::size_t> word_ends;
    std::size_t content_at;
    std::size_t pause_after;
  };
  // Token ids index the toy vocabulary; 14 and 15 are the comma and full stop.
  const std::vector<Fixture> fixtures = {
      {"navigation", "前方路口左转。", {0, 1, 2, 3, 4, 5, 15},
       {false, false, false, false, false, false, true}, {2, 4, 6, 7}, 4, 3},
      {"guided_reading", "跟我读，苹果。", {6, 7, 8, 14, 9, 10, 15},
       {false, false, false, true, false, false, true}, {3, 4, 6, 7}, 4, 3},
      {"code_reading", "验证码是379，218。", {11, 12, 13, 2, 5, 6, 7, 14, 8, 9, 10, 15},
       {false, false, false, false, false, false, false, true, false, false, false, true},
       {3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, 6, 5},
  };
  std::vector<ScenarioCase> out;
  for (const auto& f : fixtures) {
    ScenarioCase c;
    c.name = f.name;
    c.surface = f.surface;
    c.tokens = f.tokens;
    c.is_punct = f.punct;
    c.word_ends = f.word_ends;
    c.baseline = uniform_baseline(c.tokens, c.is_punct, opts.content_ms, opts.punct_ms, opts.rate);
    const std::size_t end = std::min(c.tokens.size(), f.content_at + std::max<std::size_t>(1, opts.content_span));
    c.content_edit = EditSpec{EditKind::content_set, f.content_at, end, opts.content_target_ms};
    c.pause_edit = EditSpec{EditKind::pause_set, f.pause_after, f.pause_after + 1, opts.pause_target_ms};
    out.push_back(std::move(c));
  }
  return out;
}

std::string format_manifest_line(const std::string& case_id, const EditSpec& spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "\t%zu\t%zu\t", spec.begin, spec.end);
  return case_id + "\t" + to_string(spec.kind) + buf + format_real(spec.value) + "\n";
}

std::vector<StressCase> stress_suite(const std::vector<Utterance>& corpus, const StressConfig& cfg) {
  std::vector<StressCase> out;
  auto add = [&](const Utterance& u, const std::string& tag, const EditSpec& spec, bool excluded) {
    StressCase c;
    c.case_id = u.id + "/" + tag;
    c.utterance_id = u.id;
    c.spec = spec;
    c.baseline = u.track;
    c.edited = apply_edit(u.track, spec);
    c.word_ends = u.word_ends;
    c.excluded_from_aggregates = excluded;
    out.push_back(std::move(c));
  };
  char tag[64];
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const Utterance& u = corpus[k];
    if (!u.heldout) continue;
    const std::size_t n = u.track.size();
    Rng rng = make_rng(cfg.seed, k);
    if (n >= 3) {
      std::uniform_int_distribution<std::size_t> pos(1, n - 2);
      auto pause_case = [&](double ms, bool excluded) {
        const std::size_t i = pos(rng);
        std::snprintf(tag, sizeof(tag), "pause%g", ms);
        add(u, tag, EditSpec{EditKind::pause_set, i, i + 1, ms}, excluded);
      };
      for (double ms : cfg.pause_targets_ms) pause_case(ms, false);
      for (double ms : cfg.excluded_pause_targets_ms) pause_case(ms, true);
    }
    for (std::size_t s : cfg.span_sizes) {
      if (n < s + 2) continue;
      std::uniform_int_distribution<std::size_t> pos(1, n - 1 - s);
      for (double f : cfg.factors) {
        const std::size_t b = pos(rng);
        std::snprintf(tag, sizeof(tag), "span%zu_x%g", s, f);
        add(u, tag, EditSpec{EditKind::content_scale, b, b + s, f}, false);
      }
    }
  }
  if (out.empty()) throw DomainError("stress_suite: no held-out utterance is long enough for the requested edits");
  return out;
}

}  // namespace tempo
