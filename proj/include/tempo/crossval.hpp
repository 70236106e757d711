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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tempo/align.hpp"

namespace tempo {

struct UtterancePair {
  std::string utterance_id;
  std::u32string normalized_text;
  std::vector<AxisSpan> spans_a;
  std::vector<AxisSpan> spans_b;
};

enum class FailedCheck { none, coverage, order, boundary };

const char* to_string(FailedCheck c);

struct FilterVerdict {
  bool passed = true;
  FailedCheck failed_check = FailedCheck::none;
  double worst_boundary_ms = 0.0;
};

struct FilterConfig {
  double delta_ms = 150.0;
};

/// Same set of covered characters on the axis.
bool check_coverage(const UtterancePair& pair);

/// No span of A partially overlaps a span of B (every pair nested or disjoint).
bool check_order_consistency(const UtterancePair& pair);

/// Consecutive spans of each source grouped into the smallest blocks that
/// cover identical character ranges.
struct ComparableBlock {
  std::size_t a_first, a_last;  // inclusive span indices into spans_a
  std::size_t b_first, b_last;
};

/// Requires order consistency; throws ContractError otherwise.
std::vector<ComparableBlock> comparable_blocks(const UtterancePair& pair);

struct BoundaryResult {
  bool passed = true;
  double worst_ms = 0.0;
};

/// max(|dstart|, |dend|, |dduration|) over comparable blocks, compared to
/// delta_ms. Differences are resolved at nanosecond precision.
BoundaryResult check_boundary_distance(const UtterancePair& pair, const FilterConfig& cfg);

/// Runs coverage, order and boundary checks, stopping at the first failure.
FilterVerdict filter_utterance(const UtterancePair& pair, const FilterConfig& cfg);

struct CorpusStats {
  std::size_t total = 0;
  std::size_t comparable = 0;
  std::size_t passed = 0;
  double pass_rate() const { return comparable == 0 ? 0.0 : double(passed) / double(comparable); }

  /// A missing verdict marks an utterance without two usable alignments.
  void add(const std::optional<FilterVerdict>& v);
  CorpusStats& operator+=(const CorpusStats& o);
};

template <typename Range>
CorpusStats corpus_stats(const Range& verdicts) {
  CorpusStats s;
  for (const auto& v : verdicts) s.add(v);
  return s;
}

/// `utterance_id\tpass|fail\tfailed_check\tworst_ms`
std::string format_verdict(const std::string& utterance_id, const std::optional<FilterVerdict>& v);
std::string format_stats(const CorpusStats& s, const FilterConfig& cfg);

}  // namespace tempo
