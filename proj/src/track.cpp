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

#include "tempo/track.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tempo/errors.hpp"
#include "tempo/io.hpp"

namespace tempo {

FrameRate::FrameRate(double frames_per_second) : fps_(frames_per_second) {
  if (!(frames_per_second > 0.0) || !std::isfinite(frames_per_second))
    throw DomainError("frame rate must be positive and finite");
}

LogScale::LogScale(double s) : s_(s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("log scale must be positive and finite");
}

bool TimingTrack::any_available() const {
  for (const auto& t : timings)
    if (t.content_mask || t.pause_mask) return true;
  return false;
}

bool TimingTrack::fully_available() const {
  for (const auto& t : timings)
    if (!t.content_mask || !t.pause_mask) return false;
  return true;
}

void validate(const TimingTrack& track) {
  if (track.tokens.size() != track.timings.size())
    throw DomainError("track has " + std::to_string(track.tokens.size()) + " tokens but " +
                      std::to_string(track.timings.size()) + " timings");
  for (std::size_t i = 0; i < track.timings.size(); ++i) {
    const auto& t = track.timings[i];
    if (t.content < 0 || t.pause < 0)
      throw DomainError("negative timing at token " + std::to_string(i));
    if ((!t.content_mask && t.content != 0) || (!t.pause_mask && t.pause != 0))
      throw DomainError("masked timing with nonzero value at token " + std::to_string(i));
    if (track.tokens[i] < 0) throw DomainError("negative token id at token " + std::to_string(i));
  }
}

Frames ms_to_frames(double ms, FrameRate rate) {
  if (!(ms >= 0.0) || !std::isfinite(ms)) throw DomainError("ms_to_frames: negative or non-finite ms");
  return static_cast<Frames>(std::floor(ms * rate.fps() / 1000.0 + 0.5));
}

Frames seconds_to_frames(double seconds, FrameRate rate) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds))
    throw DomainError("seconds_to_frames: negative or non-finite time");
  return static_cast<Frames>(std::floor(seconds * rate.fps() + 0.5));
}

double frames_to_ms(double frames, FrameRate rate) { return frames * 1000.0 / rate.fps(); }

double log_compress(Frames v, LogScale scale) {
  if (v < 0) throw DomainError("log_compress: negative frame count");
  return std::log1p(scale.value() * static_cast<double>(v));
}

Frames track_total_span(const TimingTrack& track) {
  Frames total = 0;
  for (const auto& t : track.timings) total += t.content + t.pause;
  return total;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("not a number: '" + std::string(s) + "'");
  return v;
}

namespace {

template <typename Int>
Int parse_int(std::string_view s, int line, const char* field) {
  Int v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(std::string("bad integer in field '") + field + "': '" + std::string(s) + "'", line);
  return v;
}

bool parse_mask(std::string_view s, int line, const char* field) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw ParseError(std::string("mask field '") + field + "' must be 0 or 1", line);
}

}  // namespace

std::string serialize_track(const TimingTrack& track) {
  validate(track);
  std::string out = "#fps=" + format_real(track.rate.fps()) + "\n";
  for (std::size_t i = 0; i < track.size(); ++i) {
    const auto& t = track.timings[i];
    out += std::to_string(track.tokens[i]);
    out += '\t' + std::to_string(t.content);
    out += '\t' + std::to_string(t.pause);
    out += t.content_mask ? "\t1" : "\t0";
    out += t.pause_mask ? "\t1\n" : "\t0\n";
  }
  return out;
}

TimingTrack deserialize_track(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || !lines.front().starts_with("#fps="))
    throw ParseError("missing '#fps=' header", 1);
  TimingTrack track;
  try {
    track.rate = FrameRate(parse_real(lines.front().substr(5)));
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad frame rate: ") + e.what(), 1);
  }
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const int line = static_cast<int>(n) + 1;
    auto fields = split_tabs(lines[n]);
    if (fields.size() == 1 && !fields[0].empty())
      throw ParseError("token without timing (token count differs from timing count)", line);
    if (fields.size() != 5) throw ParseError("expected 5 tab-separated fields", line);
    track.tokens.push_back(parse_int<TokenId>(fields[0], line, "token_id"));
    TokenTiming t;
    t.content = parse_int<Frames>(fields[1], line, "d");
    t.pause = parse_int<Frames>(fields[2], line, "p");
    t.content_mask = parse_mask(fields[3], line, "m_d");
    t.pause_mask = parse_mask(fields[4], line, "m_p");
    if (t.content < 0) throw ParseError("negative content duration", line);
    if (t.pause < 0) throw ParseError("negative pause", line);
    if (track.tokens.back() < 0) throw ParseError("negative token id", line);
    if ((!t.content_mask && t.content != 0) || (!t.pause_mask && t.pause != 0))
      throw ParseError("masked timing must be stored as 0", line);
    track.timings.push_back(t);
  }
  return track;
}

TimingTrack read_track_file(const std::string& path) {
  try {
    return deserialize_track(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_track_file(const std::string& path, const TimingTrack& track) {
  write_file(path, serialize_track(track));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ParseError("write failed for '" + path + "'");
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace tempo
