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

#include <doctest.h>

#include <string>

#include "tempo/align.hpp"
#include "tempo/errors.hpp"
#include "tempo/io.hpp"

using namespace tempo;

namespace {

struct Iv {
  double xmin, xmax;
  std::string text;
};

std::string long_textgrid(const std::vector<std::pair<std::string, std::vector<Iv>>>& tiers, double xmax) {
  std::string s = "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\nxmin = 0\nxmax = " + format_real(xmax) +
                  "\ntiers? <exists>\nsize = " + std::to_string(tiers.size()) + "\nitem []:\n";
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    s += "    item [" + std::to_string(t + 1) + "]:\n        class = \"IntervalTier\"\n        name = \"" + tiers[t].first +
         "\"\n        xmin = 0\n        xmax = " + format_real(xmax) + "\n        intervals: size = " +
         std::to_string(tiers[t].second.size()) + "\n";
    for (std::size_t k = 0; k < tiers[t].second.size(); ++k) {
      const auto& iv = tiers[t].second[k];
      s += "        intervals [" + std::to_string(k + 1) + "]:\n            xmin = " + format_real(iv.xmin) +
           "\n            xmax = " + format_real(iv.xmax) + "\n            text = \"" + iv.text + "\"\n";
    }
  }
  return s;
}

}  // namespace

TEST_CASE("silence intervals are not words") {
  const auto tg = long_textgrid({{"words", {{0, 0.1, ""}, {0.1, 0.5, "word"}}}}, 0.5);
  const auto seq = parse_textgrid(tg, "words");
  REQUIRE(seq.words.size() == 1);
  CHECK(seq.words[0].surface == "word");
  CHECK(seq.words[0].start_s == 0.1);
  CHECK(seq.words[0].end_s == 0.5);
  CHECK(seq.end_of_audio_s == 0.5);
  CHECK(seq.source == SourceTag::B);
}

TEST_CASE("all default silence labels are skipped") {
  const auto tg = long_textgrid(
      {{"words", {{0, 0.1, "sil"}, {0.1, 0.3, "a"}, {0.3, 0.4, "sp"}, {0.4, 0.6, "b"}, {0.6, 0.7, "spn"}, {0.7, 0.9, ""}}}},
      0.9);
  const auto seq = parse_textgrid(tg, "words");
  REQUIRE(seq.words.size() == 2);
  CHECK(seq.words[1].start_s == 0.4);
  TextGridOptions opts;
  opts.silence_labels = {""};
  CHECK(parse_textgrid(tg, "words", opts).words.size() == 5);
}

TEST_CASE("missing tier names the available tiers") {
  const auto tg = long_textgrid({{"words", {{0, 1, "a"}}}, {"phones", {{0, 1, "a"}}}}, 1);
  try {
    parse_textgrid(tg, "syllables");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("'words'") != std::string::npos);
    CHECK(what.find("'phones'") != std::string::npos);
  }
  CHECK(parse_textgrid(tg, "phones").words.size() == 1);
}

TEST_CASE("short-format TextGrid is rejected") {
  const std::string short_tg =
      "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n0\n1\n<exists>\n1\n\"IntervalTier\"\n\"words\"\n0\n1\n1\n0\n1\n\"a\"\n";
  CHECK_THROWS_AS(parse_textgrid(short_tg, "words"), ParseError);
}

TEST_CASE("interval errors carry line numbers") {
  auto line_of = [](const std::string& tg) {
    try {
      parse_textgrid(tg, "words");
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  auto tg = long_textgrid({{"words", {{0, 0.5, "a"}, {0.5, 0.4, "b"}}}}, 1);
  CHECK(line_of(tg) == 19);  // second interval header
  tg = long_textgrid({{"words", {{0, 0.5, "a"}}}}, 1);
  const auto at = tg.find("intervals [1]:");
  tg.replace(at, 14, "intervals [x]:");
  CHECK(line_of(tg) == 15);
  CHECK_THROWS_AS(parse_textgrid("not a textgrid", "words"), ParseError);
}

TEST_CASE("declared interval count must match") {
  auto tg = long_textgrid({{"words", {{0, 0.5, "a"}, {0.5, 1.0, "b"}}}}, 1);
  const auto at = tg.find("intervals: size = 2");
  tg.replace(at, 19, "intervals: size = 3");
  CHECK_THROWS_AS(parse_textgrid(tg, "words"), ParseError);
}

TEST_CASE("quoted labels with escapes and line breaks") {
  auto tg = long_textgrid({{"words", {{0, 0.5, "say \"\"hi\"\""}, {0.5, 1.0, "x"}}}}, 1);
  auto seq = parse_textgrid(tg, "words");
  REQUIRE(seq.words.size() == 2);
  CHECK(seq.words[0].surface == "say \"hi\"");
  tg = long_textgrid({{"words", {{0, 0.5, "two\nlines"}}}}, 1);
  seq = parse_textgrid(tg, "words");
  REQUIRE(seq.words.size() == 1);
  CHECK(seq.words[0].surface == "two\nlines");
}

TEST_CASE("fixture TextGrid from disk") {
  const auto seq = parse_textgrid(read_file(std::string(TEMPO_TEST_DATA) + "/crossval/c03_coverage_regroup.TextGrid"), "words");
  REQUIRE(seq.words.size() == 2);
  CHECK(seq.words[0].surface == "前方");
  CHECK(seq.words[1].end_s == 1.05);
  CHECK(seq.end_of_audio_s == 1.3);
}
