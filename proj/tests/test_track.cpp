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

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "tempo/errors.hpp"
#include "tempo/track.hpp"

using namespace tempo;
using namespace tempo::testing;

TEST_CASE("ms_to_frames rounds half up at the default rate") {
  const FrameRate r;
  CHECK(r.fps() == 93.75);
  CHECK(ms_to_frames(0, r) == 0);
  CHECK(ms_to_frames(170, r) == 16);   // 15.9375
  CHECK(ms_to_frames(1000, r) == 94);  // 93.75
  CHECK(ms_to_frames(320, r) == 30);
  CHECK(ms_to_frames(240, r) == 23);   // 22.5 rounds up
  CHECK(ms_to_frames(16, FrameRate(62.5)) == 1);  // exactly 1.0
  CHECK_THROWS_AS(ms_to_frames(-1, r), DomainError);
  CHECK_THROWS_AS(ms_to_frames(std::nan(""), r), DomainError);
}

TEST_CASE("frame rate must be positive") {
  CHECK_THROWS_AS(FrameRate(0.0), DomainError);
  CHECK_THROWS_AS(FrameRate(-93.75), DomainError);
  CHECK_THROWS_AS(FrameRate{INFINITY}, DomainError);
  CHECK_THROWS_AS(LogScale(0.0), DomainError);
}

TEST_CASE("ms to frames to ms stays within one frame period") {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const FrameRate r(uniform_real(rng, 10.0, 200.0));
    const double ms = uniform_real(rng, 0.0, 5000.0);
    const double back = frames_to_ms(double(ms_to_frames(ms, r)), r);
    CHECK(std::fabs(back - ms) <= r.period_ms());
  }
}

TEST_CASE("ms_to_frames is monotone") {
  Rng rng(12);
  const FrameRate r;
  for (int k = 0; k < 2000; ++k) {
    const double a = uniform_real(rng, 0.0, 3000.0), b = a + uniform_real(rng, 0.0, 50.0);
    CHECK(ms_to_frames(a, r) <= ms_to_frames(b, r));
  }
}

TEST_CASE("log_compress") {
  CHECK(log_compress(0, LogScale(1.0)) == 0.0);
  CHECK(log_compress(1, LogScale(std::numbers::e - 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(log_compress(37, LogScale(1.0)) == std::log(38.0));
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) {
    const LogScale s(uniform_real(rng, 1e-3, 10.0));
    const Frames v = uniform_int(rng, 0, 1000);
    const double y = log_compress(v, s);
    CHECK(y >= 0.0);
    CHECK((y == 0.0) == (v == 0));
    CHECK(log_compress(v + 1, s) > y);
  }
  CHECK(log_compress(10, LogScale(0.5)) < log_compress(100, LogScale(0.5)));
  CHECK_THROWS_AS(log_compress(-1, LogScale()), DomainError);
}

TEST_CASE("track_total_span") {
  TimingTrack t;
  CHECK(track_total_span(t) == 0);
  t.tokens = {1, 2};
  t.timings = {{5, 3, true, true}, {4, 0, true, true}};
  CHECK(track_total_span(t) == 12);
  t.timings = {{0, 0, false, false}, {0, 0, false, false}};
  CHECK(track_total_span(t) == 0);
}

TEST_CASE("track serialization round-trips bit-exactly") {
  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    const FrameRate r(k % 3 == 0 ? 93.75 : uniform_real(rng, 1.0, 500.0));
    const TimingTrack t = random_track(rng, 20, 1 << 20, 0.3, r);
    const std::string text = serialize_track(t);
    const TimingTrack back = deserialize_track(text);
    CHECK(back == t);
    CHECK(back.rate.fps() == t.rate.fps());
    CHECK(serialize_track(back) == text);
  }
}

TEST_CASE("track format") {
  TimingTrack t;
  t.tokens = {7, 3};
  t.timings = {{5, 3, true, true}, {0, 0, false, false}};
  CHECK(serialize_track(t) == "#fps=93.75\n7\t5\t3\t1\t1\n3\t0\t0\t0\t0\n");
}

TEST_CASE("malformed track files report the line") {
  auto line_of = [](const std::string& text) {
    try {
      deserialize_track(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("7\t5\t3\t1\t1\n") == 1);                             // no header
  CHECK(line_of("#fps=abc\n") == 1);
  CHECK(line_of("#fps=93.75\n7\t5\t3\t1\t1\n8\n") == 3);              // token without timing
  CHECK(line_of("#fps=93.75\n7\t-5\t3\t1\t1\n") == 2);                // negative d
  CHECK(line_of("#fps=93.75\n7\t5\t3\t1\n") == 2);                    // missing field
  CHECK(line_of("#fps=93.75\n7\t5\t3\t0\t1\n") == 2);                 // masked but nonzero
  CHECK(line_of("#fps=93.75\n7\t5\t3\t2\t1\n") == 2);                 // bad mask
  CHECK(line_of("#fps=93.75\n7\t5x\t3\t1\t1\n") == 2);
}

TEST_CASE("validate rejects inconsistent tracks") {
  TimingTrack t;
  t.tokens = {1};
  CHECK_THROWS_AS(validate(t), DomainError);
  t.timings = {{3, 0, false, true}};
  CHECK_THROWS_AS(validate(t), DomainError);
  CHECK_THROWS_AS(serialize_track(t), DomainError);
}
