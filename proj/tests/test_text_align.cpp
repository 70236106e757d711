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

#include "support.hpp"
#include "tempo/align.hpp"
#include "tempo/errors.hpp"
#include "tempo/text.hpp"

using namespace tempo;
using namespace tempo::testing;

namespace {

std::string norm(std::string_view s) { return encode_utf8(normalize_text(s).text); }

// Random mix of ASCII, CJK, punctuation and other scripts.
std::string random_text(Rng& rng, int max_len) {
  static const std::vector<std::string> pool = {"a", "Z", "q", "7", "0", " ", ",", "!", "。", "，", "前", "方",
                                                "路", "é", "ß", "—", "\t", "Ж", "㐀", "語", "-", "M"};
  std::string s;
  const int n = uniform_int(rng, 0, max_len);
  for (int i = 0; i < n; ++i) s += pool[static_cast<std::size_t>(uniform_int(rng, 0, int(pool.size()) - 1))];
  return s;
}

}  // namespace

TEST_CASE("normalize_text examples") {
  CHECK(norm("Hello, World!") == "helloworld");
  CHECK(norm("") == "");
  CHECK(norm("前方路口左转。") == "前方路口左转");
  CHECK(norm("验证码是379，218。") == "验证码是379218");
  CHECK(norm("Café Ж") == "caf");
  CHECK(norm("㐀") == "");  // extension A excluded by default
  NormalizeOptions ext;
  ext.include_cjk_extensions = true;
  CHECK(encode_utf8(normalize_text("㐀", ext).text) == "㐀");
}

TEST_CASE("normalize_text properties") {
  Rng rng(21);
  for (int k = 0; k < 2000; ++k) {
    const std::string raw = random_text(rng, 30);
    const auto n = normalize_text(raw);
    // Idempotent.
    CHECK(normalize_text(encode_utf8(n.text)).text == n.text);
    // Only allowed code points.
    for (char32_t c : n.text) CHECK(((c >= U'a' && c <= U'z') || (c >= U'0' && c <= U'9') || (c >= 0x4E00 && c <= 0x9FFF)));
    // Monotone map; retained characters land on their normalized copy.
    const auto cps = decode_utf8(raw);
    REQUIRE(n.raw_to_norm.size() == cps.size() + 1);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      CHECK(n.raw_to_norm[i] <= n.raw_to_norm[i + 1]);
      if (n.retained[i]) {
        char32_t c = cps[i];
        if (c >= U'A' && c <= U'Z') c += 32;
        CHECK(n.text[n.raw_to_norm[i]] == c);
        CHECK(n.raw_to_norm[i + 1] == n.raw_to_norm[i] + 1);
      } else {
        CHECK(n.raw_to_norm[i + 1] == n.raw_to_norm[i]);
      }
    }
    CHECK(n.raw_to_norm.back() == n.text.size());
  }
}

TEST_CASE("utf8 round trip") {
  const std::u32string s = U"a前\U0001F600z";
  CHECK(decode_utf8(encode_utf8(s)) == s);
}

TEST_CASE("parse_word_alignment basic records") {
  const auto seq = parse_word_alignment("#utt=u1\nhi\t0.00\t0.30\nthere\t0.35\t0.80\n");
  CHECK(seq.utterance_id == "u1");
  REQUIRE(seq.words.size() == 2);
  CHECK(seq.words[0].surface == "hi");
  CHECK(seq.words[1].start_s == 0.35);
  CHECK(seq.words[1].end_s == 0.80);
  CHECK(seq.warnings.empty());
}

TEST_CASE("parse_word_alignment errors") {
  auto line_of = [](const std::string& text) {
    try {
      parse_word_alignment(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("#utt=u\nhi\t0.5\t0.3\n") == 2);          // end < start
  CHECK(line_of("#utt=u\nhi\t0.1\n") == 2);               // missing field
  CHECK(line_of("#utt=u\nhi\t-0.1\t0.3\n") == 2);         // negative time
  CHECK(line_of("#utt=u\na\t0\t0.5\nb\t0.4\t0.9\n") == 3);  // 100 ms overlap
  CHECK(line_of("hi\t0\t1\n") == 1);                      // no header
  CHECK_THROWS_AS(parse_word_alignment("#utt=a\nx\t0\t1\n#utt=b\ny\t0\t1\n"), ParseError);
}

TEST_CASE("small overlaps are clipped with a warning") {
  // 5 ms overlap at 93.75 fps (period ~10.67 ms).
  const auto seq = parse_word_alignment("#utt=u\na\t0.000\t0.500\nb\t0.495\t0.900\n");
  REQUIRE(seq.words.size() == 2);
  CHECK(seq.words[1].start_s == 0.5);
  CHECK(seq.warnings.size() == 1);
}

TEST_CASE("word alignment serialization round-trips") {
  Rng rng(22);
  for (int k = 0; k < 200; ++k) {
    AlignmentSeq seq;
    seq.utterance_id = "u" + std::to_string(k);
    if (coin(rng)) seq.transcript = "some text " + std::to_string(k);
    double t = uniform_real(rng, 0, 1);
    for (int w = uniform_int(rng, 0, 8); w > 0; --w) {
      const double s = t + uniform_real(rng, 0, 0.3), e = s + uniform_real(rng, 0, 0.6);
      seq.words.push_back({"w" + std::to_string(w), s, e});
      t = e;
    }
    if (coin(rng)) seq.end_of_audio_s = t + 0.25;
    const auto back = parse_word_alignment(serialize_word_alignment(seq));
    CHECK(back.utterance_id == seq.utterance_id);
    CHECK(back.transcript == seq.transcript);
    CHECK(back.end_of_audio_s == seq.end_of_audio_s);
    REQUIRE(back.words.size() == seq.words.size());
    for (std::size_t i = 0; i < seq.words.size(); ++i) {
      CHECK(back.words[i].surface == seq.words[i].surface);
      CHECK(back.words[i].start_s == seq.words[i].start_s);
      CHECK(back.words[i].end_s == seq.words[i].end_s);
    }
  }
}

TEST_CASE("multiple utterances per file") {
  const auto all = parse_word_alignments("#utt=a\nx\t0\t1\n\n#utt=b\n#text=Y z\ny\t0\t1\nz\t1\t2\n");
  REQUIRE(all.size() == 2);
  CHECK(all[1].transcript == "Y z");
  CHECK(all[1].words.size() == 2);
}

TEST_CASE("project_to_axis examples") {
  AlignmentSeq seq;
  seq.words = {{"Hello,", 0.0, 0.4}, {"world", 0.5, 0.9}};
  const auto axis = normalize_text("Hello, world!").text;
  const auto spans = project_to_axis(seq, axis);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].char_begin == 0);
  CHECK(spans[0].char_end == 5);
  CHECK(spans[1].char_begin == 5);
  CHECK(spans[1].char_end == 10);
  CHECK(spans[1].word_index == 1);

  seq.words = {{"Hello", 0.0, 0.4}, {"—", 0.4, 0.5}, {"world", 0.5, 0.9}};
  CHECK(project_to_axis(seq, axis).size() == 2);

  seq.words = {{"Hello", 0.0, 0.4}, {"worldz", 0.5, 0.9}};
  try {
    project_to_axis(seq, axis);
    FAIL("expected a projection error");
  } catch (const ProjectionError& e) {
    CHECK(e.word_index() == 1);
  }
}

TEST_CASE("projection preserves order and covered characters") {
  Rng rng(23);
  static const std::u32string alphabet = U"ab前方";
  for (int k = 0; k < 1000; ++k) {
    // Build an utterance from random words, some separated by punctuation.
    AlignmentSeq seq;
    std::string raw;
    std::u32string concat;
    const int n = uniform_int(rng, 0, 8);
    double t = 0;
    for (int w = 0; w < n; ++w) {
      std::u32string word;
      for (int c = uniform_int(rng, 1, 3); c > 0; --c) word += alphabet[static_cast<std::size_t>(uniform_int(rng, 0, 3))];
      const std::string surface = encode_utf8(word) + (coin(rng, 0.3) ? "," : "");
      raw += surface + (coin(rng) ? " " : "");
      concat += word;
      seq.words.push_back({surface, t, t + 0.1});
      t += 0.1;
    }
    const auto axis = normalize_text(raw).text;
    const auto spans = project_to_axis(seq, axis);
    REQUIRE(spans.size() == seq.words.size());
    std::u32string covered;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (i > 0) CHECK(spans[i].char_begin > spans[i - 1].char_begin);
      if (i > 0) CHECK(spans[i].char_begin >= spans[i - 1].char_end);
      CHECK(spans[i].char_begin < spans[i].char_end);
      covered += axis.substr(spans[i].char_begin, spans[i].char_end - spans[i].char_begin);
    }
    CHECK(covered == concat);
  }
}
