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

#include <cstdlib>

#include "support.hpp"
#include "tempo/errors.hpp"
#include "tempo/world.hpp"

using namespace tempo;
using namespace tempo::testing;

TEST_CASE("signatures satisfy the similarity bound") {
  const World w(WorldConfig{});
  const auto& s = w.signatures();
  CHECK(s.rows() == 16);
  CHECK(s.cols() == 8);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    CHECK(s.row(i).norm() == doctest::Approx(1.0));
    for (Eigen::Index j = 0; j < i; ++j) CHECK(s.row(i).dot(s.row(j)) <= 0.3);
  }
}

TEST_CASE("clean render") {
  const World w(WorldConfig{});
  TimingTrack t;
  t.tokens = {3};
  t.timings = {TokenTiming{5, 3, true, true}};
  const auto f = w.render(t, 1, 0.0);
  REQUIRE(f.rows() == 8);
  for (int r = 0; r < 5; ++r) CHECK(f.row(r) == w.signatures().row(3));
  for (int r = 5; r < 8; ++r) CHECK(f.row(r).isZero(0.0));
  CHECK(w.render(TimingTrack{}, 1).rows() == 0);
  t.tokens = {16};
  CHECK_THROWS_AS(w.render(t, 1), DomainError);
}

TEST_CASE("render length and determinism") {
  const World w(WorldConfig{});
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto t = random_world_track(rng);
    const auto a = w.render(t, 5);
    CHECK(a.rows() == track_total_span(t));
    CHECK(a == w.render(t, 5));
  }
}

TEST_CASE("oracle alignment inverts a clean render") {
  const World w(WorldConfig{});
  Rng rng(2);
  for (int k = 0; k < 300; ++k) {
    const auto t = random_world_track(rng);
    const auto r = oracle_align(w.render(t, k, 0.0), t.tokens, w);
    REQUIRE(r.ok);
    CHECK(r.track == t);
    CHECK(r.leading_silence == 0);
    CHECK(r.mismatch_rate == 0.0);
  }
}

TEST_CASE("oracle alignment tolerates the default noise") {
  const World w(WorldConfig{});
  Rng rng(3);
  for (int k = 0; k < 300; ++k) {
    const auto t = random_world_track(rng);
    const auto r = oracle_align(w.render(t, k, 0.05), t.tokens, w);
    REQUIRE(r.ok);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(std::llabs(r.track.timings[i].content - t.timings[i].content) <= 1);
      CHECK(std::llabs(r.track.timings[i].pause - t.timings[i].pause) <= 1);
    }
  }
}

TEST_CASE("segmentation is monotone and tiles the frames") {
  const World w(WorldConfig{});
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const auto t = random_world_track(rng);
    auto f = w.render(t, k, uniform_real(rng, 0.0, 0.5));
    // Scramble a few frames.
    for (int j = 0; j < 3 && f.rows() > 0; ++j) f.row(uniform_int(rng, 0, int(f.rows()) - 1)).setRandom();
    const auto r = oracle_align(f, t.tokens, w, FrameRate{}, AlignOptions{1.0});
    if (!r.ok) continue;
    CHECK(r.leading_silence + track_total_span(r.track) == f.rows());
    const auto on = token_onsets(r);
    for (std::size_t i = 1; i < on.size(); ++i) CHECK(on[i] >= on[i - 1]);
  }
}

TEST_CASE("boundary bleed shifts the recovered duration by at most the bleed") {
  const World w(WorldConfig{});
  TimingTrack t;
  t.tokens = {1, 2, 3};
  t.timings = {TokenTiming{10, 0, true, true}, TokenTiming{12, 0, true, true}, TokenTiming{8, 0, true, true}};
  auto f = w.render(t, 0, 0.0);
  // Two frames of token 1 leak into token 2's first frames.
  f.row(10) = w.signatures().row(1);
  f.row(11) = w.signatures().row(1);
  const auto r = oracle_align(f, t.tokens, w);
  REQUIRE(r.ok);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::llabs(r.track.timings[i].content - t.timings[i].content) <= 2);
}

TEST_CASE("degenerate inputs fail alignment") {
  const World w(WorldConfig{});
  const std::vector<TokenId> toks{1, 2};
  CHECK_FALSE(oracle_align(FeatureSeq::Zero(20, 8), toks, w).ok);
  CHECK_FALSE(oracle_align(FeatureSeq::Zero(1, 8), toks, w).ok);
  CHECK_FALSE(oracle_align(FeatureSeq::Zero(5, 8), {}, w).ok);
  FeatureSeq wrong(20, 8);
  for (int r = 0; r < 20; ++r) wrong.row(r) = w.signatures().row(9);
  const auto res = oracle_align(wrong, toks, w);
  CHECK_FALSE(res.ok);
  CHECK(res.failure == "too many misclassified frames");
}

TEST_CASE("corpus generation") {
  WorldConfig cfg;
  const auto a = gen_corpus(cfg, 200, 50, 9);
  const auto b = gen_corpus(cfg, 200, 50, 9);
  REQUIRE(a.size() == 200);
  std::size_t held = 0, pauses = 0, tokens = 0;
  for (std::size_t u = 0; u < a.size(); ++u) {
    CHECK(a[u].track == b[u].track);
    CHECK(a[u].word_ends == b[u].word_ends);
    held += a[u].heldout;
    CHECK(a[u].word_ends.back() == a[u].track.size());
    for (const auto& t : a[u].track.timings) {
      CHECK(t.content >= cfg.content_min);
      CHECK(t.content <= cfg.content_max);
      pauses += t.pause > 0;
      ++tokens;
    }
  }
  CHECK(held == 50);
  const double frac = double(pauses) / double(tokens);
  CHECK(frac >= 0.25);
  CHECK(frac <= 0.35);
  CHECK(gen_corpus(cfg, 5, 0, 10)[0].track != a[0].track);
  CHECK_THROWS_AS(gen_corpus(cfg, 0, 0, 1), DomainError);
}

TEST_CASE("feature files round-trip through 32-bit floats") {
  Rng rng(5);
  FeatureSeq f(7, 3);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = double(float(uniform_real(rng, -3, 3)));
  CHECK(decode_features(encode_features(f)) == f);
  CHECK(decode_features(encode_features(FeatureSeq(0, 8))).cols() == 8);
  auto bytes = encode_features(f);
  bytes.pop_back();
  CHECK_THROWS_AS(decode_features(bytes), ParseError);
  CHECK_THROWS_AS(decode_features("abc"), ParseError);
}

TEST_CASE("world config validation") {
  WorldConfig c;
  c.content_min = 0;
  CHECK_THROWS_AS(World{c}, DomainError);
  c = WorldConfig{};
  c.pause_prob = 1.5;
  CHECK_THROWS_AS(World{c}, DomainError);
}
