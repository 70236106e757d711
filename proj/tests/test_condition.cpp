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

#include "support.hpp"
#include "tempo/condition.hpp"
#include "tempo/flow.hpp"

using namespace tempo;
using namespace tempo::testing;

namespace {

// Independent reference of the two-layer encoder using scalar loops.
std::vector<double> reference_encoder(const TimingEncoder<double>& enc, double x) {
  const auto& w1 = enc.hidden.weight.value;
  const auto& b1 = enc.hidden.bias.value;
  const auto& w2 = enc.out.weight.value;
  const auto& b2 = enc.out.bias.value;
  std::vector<double> h(static_cast<std::size_t>(w1.cols()));
  for (Eigen::Index j = 0; j < w1.cols(); ++j) {
    const double z = x * w1(0, j) + b1(0, j);
    h[static_cast<std::size_t>(j)] = z / (1.0 + std::exp(-z));
  }
  std::vector<double> y(static_cast<std::size_t>(w2.cols()));
  for (Eigen::Index k = 0; k < w2.cols(); ++k) {
    double acc = b2(0, k);
    for (Eigen::Index j = 0; j < w1.cols(); ++j) acc += h[static_cast<std::size_t>(j)] * w2(j, k);
    y[static_cast<std::size_t>(k)] = acc;
  }
  return y;
}

ConditionNet<double> random_net(Rng& rng, bool zero_gates) {
  ConditionConfig cfg;
  cfg.vocab = uniform_int(rng, 2, 16);
  cfg.embed_dim = uniform_int(rng, 1, 12);
  cfg.hidden_dim = uniform_int(rng, 1, 12);
  cfg.log_scale_content = uniform_real(rng, 0.1, 3.0);
  cfg.log_scale_pause = uniform_real(rng, 0.1, 3.0);
  ConditionNet<double> net(cfg);
  net.init(rng);
  if (!zero_gates) {
    net.gate_content.value(0, 0) = uniform_real(rng, -2.0, 2.0);
    net.gate_pause.value(0, 0) = uniform_real(rng, -2.0, 2.0);
  }
  return net;
}

}  // namespace

TEST_CASE("residual vanishes at zero value and under a zero mask") {
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    TimingEncoder<double> enc(uniform_int(rng, 1, 16), uniform_int(rng, 1, 16));
    enc.init(rng);
    fill_normal(enc.out.bias.value, 3.0, rng);
    const LogScale s(uniform_real(rng, 0.01, 10.0));
    const auto z = timing_residual<double>(0, true, enc, s);
    CHECK((z.array() == 0.0).all());
    const auto m = timing_residual<double>(uniform_int(rng, 1, 500), false, enc, s);
    CHECK((m.array() == 0.0).all());
  }
}

TEST_CASE("residual matches a reference forward pass") {
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    TimingEncoder<double> enc(uniform_int(rng, 1, 16), uniform_int(rng, 1, 16));
    enc.init(rng);
    const double s = uniform_real(rng, 0.1, 3.0);
    const Frames v = k == 0 ? 37 : uniform_int(rng, 1, 300);
    const auto r = timing_residual<double>(v, true, enc, LogScale(s));
    const auto a = reference_encoder(enc, std::log(1.0 + s * double(v)));
    const auto b = reference_encoder(enc, 0.0);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(r(Eigen::Index(j)) == doctest::Approx(a[j] - b[j]).epsilon(1e-12));
  }
}

TEST_CASE("inject") {
  RowVec<double> e(3), d(3), p(3);
  e << 1, 2, 3;
  d << 0.5, -1, 2;
  p << 4, 4, 4;
  CHECK(inject<double>(e, d, p, 0.0, 0.0) == e);
  CHECK(inject<double>(e, RowVec<double>::Zero(3), RowVec<double>::Zero(3), 0.7, -0.3) == e);
  CHECK(inject<double>(e, d, p, 1.0, 0.0) == e + d);
  const RowVec<double> mixed = inject<double>(e, d, p, 2.0, -0.5);
  for (int j = 0; j < 3; ++j) CHECK(mixed(j) == doctest::Approx(e(j) + 2.0 * d(j) - 0.5 * p(j)));
  CHECK_THROWS_AS(inject<double>(e, RowVec<double>::Zero(2), p, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("zero gates leave embeddings untouched bit for bit") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    auto net = random_net(rng, true);
    auto track = random_track(rng, 12, net.config.vocab);
    const Mat<double> with = net.forward(track.tokens, &track, nullptr);
    const Mat<double> without = net.forward(track.tokens, nullptr, nullptr);
    CHECK(with == without);
  }
}

TEST_CASE("an all-masked track matches no track for any gates") {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    auto net = random_net(rng, false);
    const auto track = mask_all(random_track(rng, 12, net.config.vocab));
    CHECK(net.forward(track.tokens, &track, nullptr) == net.forward(track.tokens, nullptr, nullptr));
  }
}

TEST_CASE("conditioned embeddings equal embedding plus gated residuals") {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    auto net = random_net(rng, false);
    const auto track = random_track(rng, 10, net.config.vocab);
    const Mat<double> out = net.forward(track.tokens, &track, nullptr);
    for (std::size_t i = 0; i < track.size(); ++i) {
      const auto& t = track.timings[i];
      const RowVec<double> expect = inject<double>(
          net.embedding.value.row(track.tokens[i]),
          timing_residual<double>(t.content, t.content_mask, net.content_enc, LogScale(net.config.log_scale_content)),
          timing_residual<double>(t.pause, t.pause_mask, net.pause_enc, LogScale(net.config.log_scale_pause)),
          net.alpha_content(), net.alpha_pause());
      for (Eigen::Index j = 0; j < expect.size(); ++j)
        CHECK(out(Eigen::Index(i), j) == doctest::Approx(expect(j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("condition rejects bad inputs") {
  Rng rng(6);
  auto net = random_net(rng, false);
  std::vector<TokenId> toks{0, 1};
  TimingTrack one;
  one.tokens = {0};
  one.timings = {TokenTiming{}};
  CHECK_THROWS_AS(net.forward(toks, &one, nullptr), std::invalid_argument);
  std::vector<TokenId> bad{net.config.vocab};
  CHECK_THROWS_AS(net.forward(bad, nullptr, nullptr), std::out_of_range);
}

TEST_CASE("gate gradient is the inner product with the residual") {
  Rng rng(7);
  auto net = random_net(rng, false);
  TimingTrack track;
  track.tokens = {0, 1 % net.config.vocab};
  track.timings = {TokenTiming{12, 0, true, true}, TokenTiming{0, 9, true, true}};
  ConditionNet<double>::Cache cache;
  const Mat<double> out = net.forward(track.tokens, &track, &cache);
  Mat<double> up(out.rows(), out.cols());
  fill_normal(up, 1.0, rng);
  for (auto& p : [&] { ParamList<double> l; net.collect(l, "c"); return l; }()) p.param->zero_grad();
  net.backward(cache, up);
  const auto d_res = timing_residual<double>(12, true, net.content_enc, LogScale(net.config.log_scale_content));
  const auto p_res = timing_residual<double>(9, true, net.pause_enc, LogScale(net.config.log_scale_pause));
  CHECK(net.gate_content.grad(0, 0) == doctest::Approx(up.row(0).dot(d_res)).epsilon(1e-12));
  CHECK(net.gate_pause.grad(0, 0) == doctest::Approx(up.row(1).dot(p_res)).epsilon(1e-12));

  // Zero values: no residual, no gate gradient.
  track.timings = {TokenTiming{0, 0, true, true}, TokenTiming{0, 0, true, true}};
  net.forward(track.tokens, &track, &cache);
  net.gate_content.zero_grad();
  net.gate_pause.zero_grad();
  net.content_enc.hidden.weight.zero_grad();
  net.backward(cache, up);
  CHECK(net.gate_content.grad(0, 0) == 0.0);
  CHECK(net.gate_pause.grad(0, 0) == 0.0);
  CHECK(net.content_enc.hidden.weight.grad.isZero(0.0));
}

TEST_CASE("gate telemetry") {
  GateTelemetry t(0.6);
  auto r = t.update(1, 0.02, -0.5);
  CHECK(r.ema_content == 0.02);
  CHECK(r.abs_pause == 0.5);
  r = t.update(2, -0.03, 0.5);
  CHECK(r.ema_content == doctest::Approx(0.6 * 0.02 + 0.4 * 0.03));
  CHECK(r.ema_content == doctest::Approx(0.024));
  CHECK_THROWS_AS(t.update(2, 0, 0), DomainError);
  for (long s = 3; s < 200; ++s) r = t.update(s, 0.0879, 0.01);
  CHECK(r.ema_content == doctest::Approx(0.0879));
  CHECK_THROWS_AS(GateTelemetry(1.0), DomainError);
  CHECK_THROWS_AS(GateTelemetry(-0.1), DomainError);
}
