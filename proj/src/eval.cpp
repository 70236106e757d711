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

#include "tempo/eval.hpp"

#include <algorithm>
#include <cmath>

#include "tempo/errors.hpp"

namespace tempo {

TimingComparison compare_tracks(const std::string& id, const TimingTrack& target, const AlignResult& realized,
                                std::size_t first, std::optional<std::size_t> last) {
  TimingComparison c;
  c.utterance_id = id;
  c.alignment_ok = realized.ok;
  if (!realized.ok) return c;
  if (realized.track.size() != target.size()) throw DomainError("compare_tracks: token count mismatch");
  const std::size_t end = last.value_or(target.size());
  if (first > end || end > target.size()) throw DomainError("compare_tracks: bad token range");
  const FrameRate rate = target.rate;
  for (std::size_t i = first; i < end; ++i) {
    const auto& t = target.timings[i];
    const auto& r = realized.track.timings[i];
    c.tokens.push_back(TokenComparison{frames_to_ms(double(t.content), rate), frames_to_ms(double(r.content), rate),
                                       frames_to_ms(double(t.pause), rate), frames_to_ms(double(r.pause), rate)});
  }
  return c;
}

namespace {

template <typename F>
void for_scored(const std::vector<TimingComparison>& cmp, F&& f) {
  for (const auto& u : cmp)
    if (u.alignment_ok)
      for (const auto& t : u.tokens) f(t);
}

template <typename Get>
double pooled_mae(const std::vector<TimingComparison>& cmp, Get get) {
  double sum = 0.0;
  std::size_t n = 0;
  for_scored(cmp, [&](const TokenComparison& t) {
    const auto [target, realized] = get(t);
    sum += std::fabs(target - realized);
    ++n;
  });
  if (n == 0) throw DomainError("MAE over an empty scored set");
  return sum / double(n);
}

}  // namespace

double content_mae(const std::vector<TimingComparison>& cmp) {
  return pooled_mae(cmp, [](const TokenComparison& t) { return std::pair{t.target_content_ms, t.realized_content_ms}; });
}

double pause_mae(const std::vector<TimingComparison>& cmp) {
  return pooled_mae(cmp, [](const TokenComparison& t) { return std::pair{t.target_pause_ms, t.realized_pause_ms}; });
}

Correlation pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("pearson: length mismatch");
  Correlation r;
  const std::size_t n = x.size();
  if (n < 2) return r;
  // Welford-style running moments.
  double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = double(i + 1);
    const double dx = x[i] - mx, dy = y[i] - my;
    mx += dx / k;
    my += dy / k;
    sxx += dx * (x[i] - mx);
    syy += dy * (y[i] - my);
    sxy += dx * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return r;
  r.value = sxy / std::sqrt(sxx * syy);
  r.value = std::clamp(r.value, -1.0, 1.0);
  r.defined = true;
  return r;
}

Correlation content_corr(const std::vector<TimingComparison>& cmp) {
  std::vector<double> x, y;
  for_scored(cmp, [&](const TokenComparison& t) {
    x.push_back(t.target_content_ms);
    y.push_back(t.realized_content_ms);
  });
  return pearson(x, y);
}

Correlation pause_corr(const std::vector<TimingComparison>& cmp) {
  std::vector<double> x, y;
  for_scored(cmp, [&](const TokenComparison& t) {
    x.push_back(t.target_pause_ms);
    y.push_back(t.realized_pause_ms);
  });
  return pearson(x, y);
}

F1Result pause_f1(const std::vector<TimingComparison>& cmp, double threshold_ms) {
  F1Result r;
  for_scored(cmp, [&](const TokenComparison& t) {
    const bool ref = t.target_pause_ms > threshold_ms;
    const bool pred = t.realized_pause_ms > threshold_ms;
    r.ref_pos += ref;
    r.pred_pos += pred;
    r.true_pos += ref && pred;
  });
  if (r.ref_pos == 0 && r.pred_pos == 0) {
    r.degenerate = true;
    r.f1 = r.precision = r.recall = 1.0;
    return r;
  }
  r.precision = r.pred_pos ? double(r.true_pos) / double(r.pred_pos) : 0.0;
  r.recall = r.ref_pos ? double(r.true_pos) / double(r.ref_pos) : 0.0;
  r.f1 = (r.precision + r.recall) > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

std::size_t scored_utterances(const std::vector<TimingComparison>& cmp) {
  return static_cast<std::size_t>(std::count_if(cmp.begin(), cmp.end(), [](const auto& c) { return c.alignment_ok; }));
}

std::size_t failed_utterances(const std::vector<TimingComparison>& cmp) { return cmp.size() - scored_utterances(cmp); }

const char* to_string(EditKind k) {
  switch (k) {
    case EditKind::pause_set: return "pause_set";
    case EditKind::content_scale: return "content_scale";
    case EditKind::content_set: return "content_set";
  }
  return "?";
}

std::vector<BiasRow> baseline_bias(const std::vector<EditCase>& cases) {
  if (cases.empty()) throw DomainError("baseline_bias: no cases");
  struct Acc {
    std::size_t n = 0;
    double bt = 0, bm = 0, et = 0, em = 0;
  } content, pause;
  for (const auto& c : cases) {
    if (c.excluded_from_aggregates || !c.realized_baseline.ok || !c.realized_edited.ok) continue;
    const FrameRate rate = c.baseline.rate;
    auto ms = [&](Frames f) { return frames_to_ms(double(f), rate); };
    if (c.kind == EditKind::pause_set) {
      const std::size_t i = c.span_begin;
      ++pause.n;
      pause.bt += ms(c.baseline.timings[i].pause);
      pause.bm += ms(c.realized_baseline.track.timings[i].pause);
      pause.et += ms(c.edited.timings[i].pause);
      pause.em += ms(c.realized_edited.track.timings[i].pause);
    } else {
      for (std::size_t i = c.span_begin; i < c.span_end; ++i) {
        ++content.n;
        content.bt += ms(c.baseline.timings[i].content);
        content.bm += ms(c.realized_baseline.track.timings[i].content);
        content.et += ms(c.edited.timings[i].content);
        content.em += ms(c.realized_edited.track.timings[i].content);
      }
    }
  }
  std::vector<BiasRow> rows;
  auto emit = [&](EditKind kind, const Acc& a) {
    if (a.n == 0) return;
    const double n = double(a.n);
    BiasRow r{kind, a.n, a.bt / n, a.bm / n, a.et / n, a.em / n, 0.0};
    r.abs_bias = std::fabs(r.edit_mean - r.edit_target);
    rows.push_back(r);
  };
  emit(EditKind::content_set, content);
  emit(EditKind::pause_set, pause);
  if (rows.empty()) throw DomainError("baseline_bias: no aligned cases");
  return rows;
}

std::vector<std::pair<double, double>> word_intervals_ms(const AlignResult& realized,
                                                         const std::vector<std::size_t>& word_ends) {
  std::vector<std::pair<double, double>> out;
  if (!realized.ok) return out;
  const auto onsets = token_onsets(realized);
  const FrameRate rate = realized.track.rate;
  std::size_t begin = 0;
  for (std::size_t end : word_ends) {
    if (end <= begin || end > onsets.size()) throw DomainError("word grouping does not match the alignment");
    const double on = frames_to_ms(double(onsets[begin]), rate);
    const double off = frames_to_ms(double(onsets[end - 1] + realized.track.timings[end - 1].content), rate);
    out.emplace_back(on, off);
    begin = end;
  }
  return out;
}

namespace {

bool inside_content(double b, const std::vector<std::pair<double, double>>& words, double tol) {
  for (const auto& [on, off] : words)
    if (on + tol < b && b < off - tol) return true;
  return false;
}

}  // namespace

bool strict_filter(const EditCase& c, const std::vector<std::pair<double, double>>& word_intervals,
                   double tolerance_ms) {
  const auto& r = c.realized_edited;
  if (!r.ok) return false;
  const auto onsets = token_onsets(r);
  const FrameRate rate = r.track.rate;
  auto offset_ms = [&](std::size_t i) { return frames_to_ms(double(onsets[i] + r.track.timings[i].content), rate); };
  if (c.kind == EditKind::pause_set) return !inside_content(offset_ms(c.span_begin), word_intervals, tolerance_ms);
  const double left = frames_to_ms(double(onsets[c.span_begin]), rate);
  const double right = offset_ms(c.span_end - 1);
  return !inside_content(left, word_intervals, tolerance_ms) && !inside_content(right, word_intervals, tolerance_ms);
}

namespace {

double span_ms(const AlignResult& r, std::size_t begin, std::size_t end) {
  const auto onsets = token_onsets(r);
  const Frames f = onsets[end - 1] + r.track.timings[end - 1].content - onsets[begin];
  return frames_to_ms(double(f), r.track.rate);
}

}  // namespace

SpanRatio span_ratio(const EditCase& c) {
  if (c.span_end <= c.span_begin) throw DomainError("span_ratio: empty span");
  SpanRatio s;
  s.baseline_span_ms = span_ms(c.realized_baseline, c.span_begin, c.span_end);
  s.edited_span_ms = span_ms(c.realized_edited, c.span_begin, c.span_end);
  if (s.baseline_span_ms <= 0.0) throw DomainError("span_ratio: baseline span is zero");
  double factor = c.value;
  if (c.kind != EditKind::content_scale) {
    double bt = 0, et = 0;
    for (std::size_t i = c.span_begin; i < c.span_end; ++i) {
      bt += double(c.baseline.timings[i].content);
      et += double(c.edited.timings[i].content);
    }
    factor = bt > 0 ? et / bt : 1.0;
  }
  s.realized_factor = s.edited_span_ms / s.baseline_span_ms;
  s.error_ms = std::fabs(s.edited_span_ms - factor * s.baseline_span_ms);
  double drift = 0;
  int count = 0;
  const FrameRate rate = c.realized_baseline.track.rate;
  auto delta = [&](std::size_t i) {
    return std::fabs(frames_to_ms(double(c.realized_edited.track.timings[i].content), rate) -
                     frames_to_ms(double(c.realized_baseline.track.timings[i].content), rate));
  };
  if (c.span_begin > 0) drift += delta(c.span_begin - 1), ++count;
  if (c.span_end < c.baseline.size()) drift += delta(c.span_end), ++count;
  s.neighbor_drift_ms = count ? drift / count : 0.0;
  return s;
}

double pause_neighbor_drift_ms(const EditCase& c) {
  const FrameRate rate = c.realized_baseline.track.rate;
  double drift = 0;
  int count = 0;
  for (std::size_t i : {c.span_begin, c.span_begin + 1}) {
    if (i >= c.baseline.size()) continue;
    drift += std::fabs(frames_to_ms(double(c.realized_edited.track.timings[i].content), rate) -
                       frames_to_ms(double(c.realized_baseline.track.timings[i].content), rate));
    ++count;
  }
  return count ? drift / count : 0.0;
}

}  // namespace tempo
