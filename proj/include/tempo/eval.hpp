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

#include <optional>
#include <string>
#include <vector>

#include "tempo/track.hpp"
#include "tempo/world.hpp"

namespace tempo {

/// Target vs realized timing of one token, in ms.
struct TokenComparison {
  double target_content_ms = 0, realized_content_ms = 0;
  double target_pause_ms = 0, realized_pause_ms = 0;
};

/// One utterance; only alignment_ok utterances enter aggregates.
struct TimingComparison {
  std::string utterance_id;
  bool alignment_ok = true;
  std::vector<TokenComparison> tokens;
};

/// Builds a comparison from target and realized tracks over tokens
/// [first, last).
TimingComparison compare_tracks(const std::string& id, const TimingTrack& target, const AlignResult& realized,
                                std::size_t first = 0, std::optional<std::size_t> last = {});

/// Pooled mean |target - realized| over scored tokens. Throws DomainError
/// when nothing is scored.
double content_mae(const std::vector<TimingComparison>& cmp);
double pause_mae(const std::vector<TimingComparison>& cmp);

struct Correlation {
  double value = 0.0;
  bool defined = false;  // false when either side has zero variance
};

/// Pearson r over pooled scored tokens.
Correlation pearson(const std::vector<double>& x, const std::vector<double>& y);
Correlation content_corr(const std::vector<TimingComparison>& cmp);
Correlation pause_corr(const std::vector<TimingComparison>& cmp);

struct F1Result {
  double f1 = 0.0, precision = 0.0, recall = 0.0;
  std::size_t true_pos = 0, ref_pos = 0, pred_pos = 0;
  bool degenerate = false;  // no reference and no predicted pauses
};

/// A boundary counts as a pause when its duration strictly exceeds the
/// threshold.
F1Result pause_f1(const std::vector<TimingComparison>& cmp, double threshold_ms);

std::size_t scored_utterances(const std::vector<TimingComparison>& cmp);
std::size_t failed_utterances(const std::vector<TimingComparison>& cmp);

// ---------------------------------------------------------------------------
// Local edits

enum class EditKind { pause_set, content_scale, content_set };
const char* to_string(EditKind k);

/// A realized edit: targets, tracks and the aligned baseline/edited runs.
struct EditCase {
  std::string case_id;
  EditKind kind = EditKind::content_set;
  std::size_t span_begin = 0, span_end = 0;  // token range; pause edits use span_begin
  double value = 0.0;                        // factor or ms
  TimingTrack baseline, edited;
  AlignResult realized_baseline, realized_edited;
  std::vector<std::size_t> word_ends;        // word grouping of tokens
  bool excluded_from_aggregates = false;
};

struct BiasRow {
  EditKind kind = EditKind::content_set;
  std::size_t n = 0;
  double base_target = 0, base_mean = 0, edit_target = 0, edit_mean = 0, abs_bias = 0;
};

/// Means over edited positions (content: per edited token; pause: the edited
/// boundary) for each edit type present. Pause edits are one row; content
/// edits (scale or set) share the other.
std::vector<BiasRow> baseline_bias(const std::vector<EditCase>& cases);

/// Realized content interval [onset, offset) of every word, in ms.
std::vector<std::pair<double, double>> word_intervals_ms(const AlignResult& realized,
                                                         const std::vector<std::size_t>& word_ends);

/// Keeps a content edit when both span boundaries, and a pause edit when
/// its boundary, lie outside every word's content interior (within
/// `tolerance_ms` of a word edge counts as on the edge).
bool strict_filter(const EditCase& c, const std::vector<std::pair<double, double>>& word_intervals,
                   double tolerance_ms = 0.0);

struct SpanRatio {
  double realized_factor = 0, error_ms = 0, neighbor_drift_ms = 0;
  double baseline_span_ms = 0, edited_span_ms = 0;
};

/// Edited span runs from the first edited token's onset to the last edited
/// token's content offset, including internal pauses. Neighbor drift is the
/// mean |change in realized content| over the tokens just left and right of
/// the span.
SpanRatio span_ratio(const EditCase& c);

/// Mean |change in realized content| of the two tokens flanking a pause
/// edit's boundary.
double pause_neighbor_drift_ms(const EditCase& c);

}  // namespace tempo
