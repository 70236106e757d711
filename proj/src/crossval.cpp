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

#include "tempo/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tempo/errors.hpp"

namespace tempo {

const char* to_string(FailedCheck c) {
  switch (c) {
    case FailedCheck::none: return "none";
    case FailedCheck::coverage: return "coverage";
    case FailedCheck::order: return "order";
    case FailedCheck::boundary: return "boundary";
  }
  return "?";
}

namespace {

std::vector<bool> covered(const std::vector<AxisSpan>& spans, std::size_t n) {
  std::vector<bool> c(n, false);
  for (const auto& s : spans)
    for (std::size_t i = s.char_begin; i < s.char_end && i < n; ++i) c[i] = true;
  return c;
}

std::size_t axis_extent(const UtterancePair& pair) {
  std::size_t n = pair.normalized_text.size();
  for (const auto& s : pair.spans_a) n = std::max(n, s.char_end);
  for (const auto& s : pair.spans_b) n = std::max(n, s.char_end);
  return n;
}

bool crossing(const AxisSpan& x, const AxisSpan& y) {
  const bool overlap = std::max(x.char_begin, y.char_begin) < std::min(x.char_end, y.char_end);
  if (!overlap) return false;
  const bool x_in_y = y.char_begin <= x.char_begin && x.char_end <= y.char_end;
  const bool y_in_x = x.char_begin <= y.char_begin && y.char_end <= x.char_end;
  return !x_in_y && !y_in_x;
}

// Seconds difference in ms, rounded to the nanosecond so decimal inputs at
// exactly delta compare equal to delta.
double diff_ms(double a_s, double b_s) {
  return std::round(std::fabs(a_s - b_s) * 1e9) / 1e6;
}

}  // namespace

bool check_coverage(const UtterancePair& pair) {
  const std::size_t n = axis_extent(pair);
  return covered(pair.spans_a, n) == covered(pair.spans_b, n);
}

bool check_order_consistency(const UtterancePair& pair) {
  for (const auto& a : pair.spans_a)
    for (const auto& b : pair.spans_b)
      if (crossing(a, b)) return false;
  return true;
}

std::vector<ComparableBlock> comparable_blocks(const UtterancePair& pair) {
  if (!check_order_consistency(pair))
    throw ContractError("comparable blocks require order-consistent spans");
  const auto& A = pair.spans_a;
  const auto& B = pair.spans_b;
  std::vector<ComparableBlock> blocks;
  std::size_t i = 0, j = 0;
  while (i < A.size() && j < B.size()) {
    const bool overlap = std::max(A[i].char_begin, B[j].char_begin) < std::min(A[i].char_end, B[j].char_end);
    if (!overlap) {
      // Uncovered by the other source; only reachable when coverage differs.
      if (A[i].char_end <= B[j].char_begin) ++i;
      else ++j;
      continue;
    }
    ComparableBlock blk{i, i, j, j};
    std::size_t end_a = A[i].char_end, end_b = B[j].char_end;
    while (end_a != end_b) {
      if (end_a < end_b) {
        if (blk.a_last + 1 >= A.size() || A[blk.a_last + 1].char_begin >= end_b) break;
        end_a = A[++blk.a_last].char_end;
      } else {
        if (blk.b_last + 1 >= B.size() || B[blk.b_last + 1].char_begin >= end_a) break;
        end_b = B[++blk.b_last].char_end;
      }
    }
    blocks.push_back(blk);
    i = blk.a_last + 1;
    j = blk.b_last + 1;
  }
  return blocks;
}

BoundaryResult check_boundary_distance(const UtterancePair& pair, const FilterConfig& cfg) {
  BoundaryResult r;
  for (const auto& blk : comparable_blocks(pair)) {
    const double sa = pair.spans_a[blk.a_first].start_s, ea = pair.spans_a[blk.a_last].end_s;
    const double sb = pair.spans_b[blk.b_first].start_s, eb = pair.spans_b[blk.b_last].end_s;
    const double worst = std::max({diff_ms(sa, sb), diff_ms(ea, eb), diff_ms(ea - sa, eb - sb)});
    r.worst_ms = std::max(r.worst_ms, worst);
  }
  r.passed = r.worst_ms <= cfg.delta_ms;
  return r;
}

FilterVerdict filter_utterance(const UtterancePair& pair, const FilterConfig& cfg) {
  FilterVerdict v;
  if (!check_coverage(pair)) {
    v.passed = false;
    v.failed_check = FailedCheck::coverage;
    return v;
  }
  if (!check_order_consistency(pair)) {
    v.passed = false;
    v.failed_check = FailedCheck::order;
    return v;
  }
  const auto b = check_boundary_distance(pair, cfg);
  v.worst_boundary_ms = b.worst_ms;
  if (!b.passed) {
    v.passed = false;
    v.failed_check = FailedCheck::boundary;
  }
  return v;
}

void CorpusStats::add(const std::optional<FilterVerdict>& v) {
  ++total;
  if (!v) return;
  ++comparable;
  if (v->passed) ++passed;
}

CorpusStats& CorpusStats::operator+=(const CorpusStats& o) {
  total += o.total;
  comparable += o.comparable;
  passed += o.passed;
  return *this;
}

std::string format_verdict(const std::string& utterance_id, const std::optional<FilterVerdict>& v) {
  char buf[64];
  if (!v) return utterance_id + "\tskip\tincomparable\t0.000\n";
  std::snprintf(buf, sizeof(buf), "%.3f", v->worst_boundary_ms);
  return utterance_id + (v->passed ? "\tpass\t" : "\tfail\t") + to_string(v->failed_check) + "\t" + buf + "\n";
}

std::string format_stats(const CorpusStats& s, const FilterConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "# delta_ms=%.3f\n# total=%zu\n# comparable=%zu\n# passed=%zu\n# pass_rate=%.6f\n",
                cfg.delta_ms, s.total, s.comparable, s.passed, s.pass_rate());
  return buf;
}

}  // namespace tempo
