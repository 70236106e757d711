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

#include "tempo/align.hpp"

#include <cmath>

#include "tempo/errors.hpp"
#include "tempo/io.hpp"

namespace tempo {

namespace {

double parse_time(std::string_view s, int line, const char* what) {
  double v = 0.0;
  try {
    v = parse_real(trim(s));
  } catch (const ParseError&) {
    throw ParseError(std::string("bad ") + what + " time '" + std::string(s) + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + what + " time", line);
  if (v < 0.0) throw ParseError(std::string("negative ") + what + " time", line);
  return v;
}

// Parses lines [begin, end) of one utterance block.
AlignmentSeq parse_block(const std::vector<std::string_view>& lines, std::size_t begin,
                         std::size_t end, FrameRate rate, SourceTag source) {
  AlignmentSeq seq;
  seq.source = source;
  const double tolerance_s = 1.0 / rate.fps();
  for (std::size_t n = begin; n < end; ++n) {
    const int line = static_cast<int>(n) + 1;
    std::string_view l = lines[n];
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (trim(l).empty()) continue;
    if (l.starts_with("#utt=")) {
      seq.utterance_id = std::string(trim(l.substr(5)));
      continue;
    }
    if (l.starts_with("#text=")) {
      seq.transcript = std::string(l.substr(6));
      continue;
    }
    if (l.starts_with("#end=")) {
      seq.end_of_audio_s = parse_time(l.substr(5), line, "end-of-audio");
      continue;
    }
    if (l.starts_with("#")) continue;
    auto fields = split_tabs(l);
    if (fields.size() < 3) throw ParseError("word record needs surface, start and end", line);
    if (fields.size() > 3) throw ParseError("too many fields in word record", line);
    WordSpan w;
    w.surface = std::string(trim(fields[0]));
    if (w.surface.empty()) throw ParseError("empty word surface", line);
    w.start_s = parse_time(fields[1], line, "start");
    w.end_s = parse_time(fields[2], line, "end");
    if (w.end_s < w.start_s) throw ParseError("word ends before it starts", line);
    if (!seq.words.empty()) {
      const double prev_end = seq.words.back().end_s;
      if (w.start_s < prev_end) {
        const double overlap = prev_end - w.start_s;
        if (overlap > tolerance_s + 1e-12)
          throw ParseError("word overlaps previous word by " + format_real(overlap * 1000.0) + " ms",
                           line);
        seq.warnings.push_back("line " + std::to_string(line) + ": clipped " +
                               format_real(overlap * 1000.0) + " ms overlap");
        w.start_s = prev_end;
        if (w.end_s < w.start_s) w.end_s = w.start_s;
      }
    }
    seq.words.push_back(std::move(w));
  }
  if (seq.utterance_id.empty()) throw ParseError("missing '#utt=' header", static_cast<int>(begin) + 1);
  return seq;
}

}  // namespace

AlignmentSeq parse_word_alignment(std::string_view text, FrameRate rate, SourceTag source) {
  auto all = parse_word_alignments(text, rate, source);
  if (all.size() != 1)
    throw ParseError("expected exactly one utterance, found " + std::to_string(all.size()));
  return std::move(all.front());
}

std::vector<AlignmentSeq> parse_word_alignments(std::string_view text, FrameRate rate,
                                                SourceTag source) {
  auto lines = split_lines(text);
  std::vector<AlignmentSeq> out;
  std::size_t block_start = lines.size();
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].starts_with("#utt=")) {
      if (block_start < n) out.push_back(parse_block(lines, block_start, n, rate, source));
      block_start = n;
    } else if (block_start == lines.size() && !trim(lines[n]).empty() && !lines[n].starts_with("#")) {
      throw ParseError("word record before '#utt=' header", static_cast<int>(n) + 1);
    }
  }
  if (block_start < lines.size()) out.push_back(parse_block(lines, block_start, lines.size(), rate, source));
  return out;
}

std::string serialize_word_alignment(const AlignmentSeq& seq) {
  std::string out = "#utt=" + seq.utterance_id + "\n";
  if (seq.transcript) out += "#text=" + *seq.transcript + "\n";
  if (seq.end_of_audio_s) out += "#end=" + format_real(*seq.end_of_audio_s) + "\n";
  for (const auto& w : seq.words)
    out += w.surface + "\t" + format_real(w.start_s) + "\t" + format_real(w.end_s) + "\n";
  return out;
}

std::vector<AxisSpan> project_to_axis(const AlignmentSeq& seq, std::u32string_view normalized,
                                      const NormalizeOptions& opts) {
  std::vector<AxisSpan> spans;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < seq.words.size(); ++k) {
    const auto& w = seq.words[k];
    const std::u32string surface = normalize_text(w.surface, opts).text;
    if (surface.empty()) continue;
    const auto at = normalized.find(surface, cursor);
    if (at == std::u32string_view::npos) throw ProjectionError(k, w.surface);
    spans.push_back(AxisSpan{at, at + surface.size(), w.start_s, w.end_s, k});
    cursor = at + surface.size();
  }
  return spans;
}

}  // namespace tempo
