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

#include <charconv>
#include <cmath>

#include "tempo/align.hpp"
#include "tempo/errors.hpp"
#include "tempo/io.hpp"

namespace tempo {

namespace {

struct Interval {
  double xmin = 0.0;
  double xmax = 0.0;
  std::string text;
  int line = 0;
  bool has_xmin = false, has_xmax = false, has_text = false;
};

struct Tier {
  std::string cls;
  std::string name;
  double xmin = 0.0, xmax = 0.0;
  std::vector<Interval> intervals;
  long declared_size = -1;
  int line = 0;
};

// Splits `key = value`; returns false when the line has no '='.
bool key_value(std::string_view line, std::string_view& key, std::string_view& value) {
  auto eq = line.find('=');
  if (eq == std::string_view::npos) return false;
  key = trim(line.substr(0, eq));
  value = trim(line.substr(eq + 1));
  return true;
}

// Decodes a Praat string literal ("" escapes a quote).
std::string unquote(std::string_view v, int line) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    throw ParseError("expected quoted string", line);
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    out.push_back(v[i]);
    if (v[i] == '"') ++i;
  }
  return out;
}

double number(std::string_view v, int line) {
  try {
    const double x = parse_real(v);
    if (!std::isfinite(x)) throw ParseError("non-finite", line);
    return x;
  } catch (const ParseError&) {
    throw ParseError("bad number '" + std::string(v) + "'", line);
  }
}

// Parses `<word> [<n>]:` headers, e.g. `item [2]:` or `intervals [7]:`.
bool bracket_header(std::string_view line, std::string_view word, int lineno) {
  if (!line.starts_with(word)) return false;
  auto rest = trim(line.substr(word.size()));
  if (!rest.starts_with("[")) return false;
  if (rest == "[]:" || rest == "[]") return false;
  auto close = rest.find(']');
  if (close == std::string_view::npos || close + 2 != rest.size() || rest.back() != ':')
    throw ParseError("malformed " + std::string(word) + " header", lineno);
  auto idx = rest.substr(1, close - 1);
  long n = 0;
  auto res = std::from_chars(idx.data(), idx.data() + idx.size(), n);
  if (res.ec != std::errc() || res.ptr != idx.data() + idx.size() || n < 1)
    throw ParseError("malformed " + std::string(word) + " index", lineno);
  return true;
}

}  // namespace

AlignmentSeq parse_textgrid(std::string_view text, std::string_view tier_name,
                            const TextGridOptions& opts, SourceTag source) {
  auto raw_lines = split_lines(text);
  std::vector<std::string_view> lines;
  lines.reserve(raw_lines.size());
  for (auto l : raw_lines) lines.push_back(trim(l));

  std::size_t n = 0;
  auto skip_blank = [&] {
    while (n < lines.size() && lines[n].empty()) ++n;
  };
  skip_blank();
  if (n >= lines.size() || !lines[n].starts_with("File type"))
    throw ParseError("not a TextGrid: missing 'File type' line", static_cast<int>(n) + 1);
  ++n;
  skip_blank();
  if (n >= lines.size() || lines[n].find("TextGrid") == std::string_view::npos)
    throw ParseError("not a TextGrid: missing 'Object class' line", static_cast<int>(n) + 1);
  ++n;
  skip_blank();
  if (n >= lines.size() || !lines[n].starts_with("xmin"))
    throw ParseError("only long-format TextGrid files are supported", static_cast<int>(n) + 1);

  std::vector<Tier> tiers;
  Tier* tier = nullptr;
  Interval* interval = nullptr;
  for (; n < lines.size(); ++n) {
    const int lineno = static_cast<int>(n) + 1;
    std::string_view l = lines[n];
    if (l.empty()) continue;
    if (bracket_header(l, "item", lineno)) {
      tiers.emplace_back();
      tier = &tiers.back();
      tier->line = lineno;
      interval = nullptr;
      continue;
    }
    if (tier && (bracket_header(l, "intervals", lineno) || bracket_header(l, "points", lineno))) {
      tier->intervals.emplace_back();
      interval = &tier->intervals.back();
      interval->line = lineno;
      continue;
    }
    std::string_view key, value;
    if (!key_value(l, key, value)) continue;  // `item []:`, `tiers? <exists>` and the like
    if (!tier) continue;                      // file-level xmin/xmax/size
    if (key == "intervals: size" || key == "points: size") {
      tier->declared_size = static_cast<long>(number(value, lineno));
      continue;
    }
    if (!interval) {
      if (key == "class") tier->cls = unquote(value, lineno);
      else if (key == "name") tier->name = unquote(value, lineno);
      else if (key == "xmin") tier->xmin = number(value, lineno);
      else if (key == "xmax") tier->xmax = number(value, lineno);
      continue;
    }
    if (key == "xmin" || key == "number") {
      interval->xmin = number(value, lineno);
      interval->has_xmin = true;
    } else if (key == "xmax") {
      interval->xmax = number(value, lineno);
      interval->has_xmax = true;
    } else if (key == "text" || key == "mark") {
      // Praat strings may continue over several lines.
      std::string literal(value);
      auto closed = [](const std::string& s) {
        if (s.size() < 2 || s.front() != '"' || s.back() != '"') return false;
        std::size_t quotes = 0;
        for (std::size_t i = s.size(); i-- > 1 && s[i] == '"';) ++quotes;
        return quotes % 2 == 1;
      };
      while (!closed(literal) && n + 1 < lines.size()) {
        ++n;
        literal += "\n";
        literal += raw_lines[n];
        while (!literal.empty() && (literal.back() == ' ' || literal.back() == '\r')) literal.pop_back();
      }
      interval->text = unquote(literal, lineno);
      interval->has_text = true;
    }
  }

  const Tier* found = nullptr;
  std::string available;
  for (const auto& t : tiers) {
    if (!available.empty()) available += ", ";
    available += "'" + t.name + "'";
    if (t.name == tier_name && !found) found = &t;
  }
  if (!found)
    throw ParseError("tier '" + std::string(tier_name) + "' not found; available tiers: " +
                     (available.empty() ? "(none)" : available));
  if (found->cls != "IntervalTier")
    throw ParseError("tier '" + found->name + "' is not an IntervalTier", found->line);
  if (found->declared_size >= 0 && static_cast<std::size_t>(found->declared_size) != found->intervals.size())
    throw ParseError("tier '" + found->name + "' declares " + std::to_string(found->declared_size) +
                         " intervals but has " + std::to_string(found->intervals.size()),
                     found->line);

  AlignmentSeq seq;
  seq.source = source;
  seq.end_of_audio_s = found->xmax;
  double prev_end = 0.0;
  for (const auto& iv : found->intervals) {
    if (!iv.has_xmin || !iv.has_xmax || !iv.has_text)
      throw ParseError("interval missing xmin, xmax or text", iv.line);
    if (iv.xmax < iv.xmin) throw ParseError("interval xmax < xmin", iv.line);
    if (iv.xmin < 0.0) throw ParseError("negative interval time", iv.line);
    if (iv.xmin + 1e-9 < prev_end) throw ParseError("intervals overlap or are out of order", iv.line);
    prev_end = iv.xmax;
    const std::string label(trim(iv.text));
    if (opts.silence_labels.count(label)) continue;
    seq.words.push_back(WordSpan{label, iv.xmin, iv.xmax});
  }
  return seq;
}

}  // namespace tempo
