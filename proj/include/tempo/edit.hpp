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
#include <vector>

#include "tempo/eval.hpp"
#include "tempo/track.hpp"
#include "tempo/world.hpp"

namespace tempo {

struct EditSpec {
  EditKind kind = EditKind::content_set;
  std::size_t begin = 0, end = 1;  // token range; pause_set edits the pause after `begin`
  double value = 0.0;              // ms for *_set, factor for content_scale
};

/// Every content token gets content_ms, every punctuation token punct_ms;
/// no pauses; all controls available.
TimingTrack uniform_baseline(const std::vector<TokenId>& tokens, const std::vector<bool>& is_punct,
                             double content_ms, double punct_ms, FrameRate rate);

/// Rewrites only the positions named by the edit.
TimingTrack apply_edit(const TimingTrack& track, const EditSpec& spec);

struct ScenarioCase {
  std::string name;
  std::string surface;  // documentation only; the toy world consumes ids
  std::vector<TokenId> tokens;
  std::vector<bool> is_punct;
  std::vector<std::size_t> word_ends;
  TimingTrack baseline;
  EditSpec content_edit;  // target 225 ms
  EditSpec pause_edit;    // target 260 ms
};

struct ScenarioOptions {
  double content_ms = 170.0;
  double punct_ms = 50.0;
  double content_target_ms = 225.0;
  double pause_target_ms = 260.0;
  std::size_t content_span = 1;
  FrameRate rate;
};

/// Navigation guidance, guided reading and code reading demos.
std::vector<ScenarioCase> scenario_suite(const ScenarioOptions& opts = {});

struct StressConfig {
  std::uint64_t seed = 0;
  std::vector<double> pause_targets_ms{500.0, 800.0};
  std::vector<double> excluded_pause_targets_ms{200.0};
  std::vector<double> factors{0.5, 1.5, 2.0};
  std::vector<std::size_t> span_sizes{2, 3};
};

/// An unrealized stress case: baseline track plus edit.
struct StressCase {
  std::string case_id;
  std::string utterance_id;
  EditSpec spec;
  TimingTrack baseline, edited;
  std::vector<std::size_t> word_ends;
  bool excluded_from_aggregates = false;
};

/// Single-token pause edits and multi-token content-scale edits on held-out
/// utterances. Positions never touch the first or last token.
std::vector<StressCase> stress_suite(const std::vector<Utterance>& corpus, const StressConfig& cfg);

/// `case_id\tkind\tbegin\tend\tvalue`
std::string format_manifest_line(const std::string& case_id, const EditSpec& spec);

}  // namespace tempo
