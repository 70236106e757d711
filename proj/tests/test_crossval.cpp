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

#include <algorithm>

#include "crossval_gen.hpp"
#include "support.hpp"
#include "tempo/crossval.hpp"
#include "tempo/errors.hpp"

using namespace tempo;
using namespace tempo::testing;

namespace {

AxisSpan span(std::size_t b, std::size_t e, double s = 0.0, double t = 0.0) { return AxisSpan{b, e, s, t, 0}; }

UtterancePair pair_of(std::size_t n, std::vector<AxisSpan> a, std::vector<AxisSpan> b) {
  return make_pair(n, std::move(a), std::move(b));
}

// Brute force: for every pair of spans, crossing means overlapping without
// nesting, tested character by character.
bool naive_order(const UtterancePair& p) {
  for (const auto& x : p.spans_a)
    for (const auto& y : p.spans_b) {
      bool inter = false, x_only = false, y_only = false;
      for (std::size_t c = 0; c < 64; ++c) {
        const bool in_x = c >= x.char_begin && c < x.char_end, in_y = c >= y.char_begin && c < y.char_end;
        inter |= in_x && in_y;
        x_only |= in_x && !in_y;
        y_only |= in_y && !in_x;
      }
      if (inter && x_only && y_only) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("check_coverage examples") {
  auto p = pair_of(10, {span(0, 5), span(5, 10)}, {span(0, 5), span(5, 10)});
  CHECK(check_coverage(p));
  p = pair_of(10, {span(0, 5), span(5, 10)}, {span(0, 5)});
  CHECK_FALSE(check_coverage(p));
  p = pair_of(4, {span(0, 4)}, {span(0, 2), span(2, 4)});
  CHECK(check_coverage(p));
}

TEST_CASE("check_order_consistency examples") {
  CHECK(check_order_consistency(pair_of(10, {span(0, 5), span(5, 10)}, {span(0, 10)})));
  CHECK_FALSE(check_order_consistency(pair_of(10, {span(0, 6), span(6, 10)}, {span(0, 4), span(4, 10)})));
  CHECK(check_order_consistency(pair_of(10, {span(0, 6), span(6, 10)}, {span(0, 6), span(6, 10)})));
}

TEST_CASE("check_boundary_distance examples") {
  FilterConfig cfg;
  auto p = pair_of(4, {span(0, 4, 0.1, 0.5)}, {span(0, 4, 0.1, 0.5)});
  auto r = check_boundary_distance(p, cfg);
  CHECK(r.passed);
  CHECK(r.worst_ms == 0.0);

  p = pair_of(4, {span(0, 4, 0.100, 0.5)}, {span(0, 4, 0.251, 0.5)});
  r = check_boundary_distance(p, cfg);
  CHECK_FALSE(r.passed);
  CHECK(r.worst_ms == doctest::Approx(151.0));

  p = pair_of(4, {span(0, 4, 0.1, 0.5)}, {span(0, 4, 0.2, 0.54)});  // start 100, end 40, duration 60
  r = check_boundary_distance(p, cfg);
  CHECK(r.passed);
  CHECK(r.worst_ms == doctest::Approx(100.0));

  p = pair_of(4, {span(0, 4, 0.10, 0.5)}, {span(0, 4, 0.25, 0.5)});  // exactly delta
  r = check_boundary_distance(p, cfg);
  CHECK(r.passed);
  CHECK(r.worst_ms == 150.0);

  CHECK_THROWS_AS(check_boundary_distance(pair_of(10, {span(0, 6), span(6, 10)}, {span(0, 4), span(4, 10)}), cfg),
                  ContractError);
}

TEST_CASE("regrouped spans compare as blocks") {
  // A: one word over [0,4); B: two words. Block start/end come from the
  // outer spans.
  const auto p = pair_of(4, {span(0, 4, 0.20, 1.00)}, {span(0, 2, 0.25, 0.60), span(2, 4, 0.60, 1.05)});
  const auto blocks = comparable_blocks(p);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].b_last == 1);
  CHECK(check_boundary_distance(p, FilterConfig{}).worst_ms == doctest::Approx(50.0));
}

TEST_CASE("filter_utterance short-circuits in check order") {
  FilterConfig cfg;
  // Coverage fails and boundaries are also far apart.
  auto v = filter_utterance(pair_of(10, {span(0, 5, 0, 0.5), span(5, 10, 0.5, 1)}, {span(0, 5, 2, 3)}), cfg);
  CHECK_FALSE(v.passed);
  CHECK(v.failed_check == FailedCheck::coverage);
  v = filter_utterance(pair_of(10, {span(0, 6), span(6, 10)}, {span(0, 4), span(4, 10)}), cfg);
  CHECK(v.failed_check == FailedCheck::order);
  v = filter_utterance(pair_of(4, {span(0, 4, 0.1, 0.5)}, {span(0, 4, 0.3, 0.5)}), cfg);
  CHECK(v.failed_check == FailedCheck::boundary);
  CHECK(v.worst_boundary_ms == doctest::Approx(200.0));
  v = filter_utterance(pair_of(4, {span(0, 4, 0.1, 0.5)}, {span(0, 4, 0.1, 0.5)}), cfg);
  CHECK(v.passed);
  CHECK(v.failed_check == FailedCheck::none);
}

TEST_CASE("corpus stats") {
  CorpusStats s;
  CHECK(s.total == 0);
  CHECK(s.pass_rate() == 0.0);
  FilterVerdict pass, fail;
  fail.passed = false;
  fail.failed_check = FailedCheck::boundary;
  for (auto v : {pass, pass, fail, pass}) s.add(v);
  s.add(std::nullopt);
  CHECK(s.total == 5);
  CHECK(s.comparable == 4);
  CHECK(s.passed == 3);
  CHECK(s.pass_rate() == 0.75);
  CorpusStats t = s;
  t += s;
  CHECK(t.passed == 6);
  CHECK(format_verdict("x", fail) == "x\tfail\tboundary\t0.000\n");
  CHECK(format_verdict("y", std::nullopt) == "y\tskip\tincomparable\t0.000\n");
}

TEST_CASE("properties over random pairs") {
  Rng rng(31);
  for (int k = 0; k < 1000; ++k) {
    const UtterancePair p = random_pair(rng);
    // Self-pairs always pass.
    const auto self = pair_of(p.normalized_text.size(), p.spans_a, p.spans_a);
    CHECK(filter_utterance(self, FilterConfig{uniform_real(rng, 1e-6, 500.0)}).passed);
    // Order check agrees with brute force and is symmetric.
    UtterancePair swapped = p;
    std::swap(swapped.spans_a, swapped.spans_b);
    CHECK(check_order_consistency(p) == naive_order(p));
    CHECK(check_order_consistency(p) == check_order_consistency(swapped));
    if (check_order_consistency(p))
      CHECK(check_boundary_distance(p, FilterConfig{}).worst_ms == check_boundary_distance(swapped, FilterConfig{}).worst_ms);
    // Monotone in delta.
    double d1 = uniform_real(rng, 1.0, 400.0), d2 = uniform_real(rng, 1.0, 400.0);
    if (d1 > d2) std::swap(d1, d2);
    if (filter_utterance(p, FilterConfig{d1}).passed) CHECK(filter_utterance(p, FilterConfig{d2}).passed);
  }
}
