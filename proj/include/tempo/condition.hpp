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

#pragma once

#include <optional>
#include <span>
#include <stdexcept>

#include "tempo/errors.hpp"
#include "tempo/nn.hpp"
#include "tempo/track.hpp"

namespace tempo {

/// Scalar-to-vector encoder R -> R^H -> R^E with a SiLU between layers.
template <typename Scalar>
struct TimingEncoder {
  Linear<Scalar> hidden, out;

  struct Cache {
    Mat<Scalar> input, pre, act;
  };

  TimingEncoder() = default;
  TimingEncoder(Eigen::Index hidden_dim, Eigen::Index embed_dim) : hidden(1, hidden_dim), out(hidden_dim, embed_dim) {}

  template <typename Rng>
  void init(Rng& rng) {
    hidden.init(rng);
    fill_normal(hidden.bias.value, Scalar(0.5), rng);
    out.init(rng);
  }

  /// One output row per input row; `x` is n x 1.
  Mat<Scalar> forward(const Mat<Scalar>& x, Cache* cache) const {
    Mat<Scalar> pre = hidden.forward(x);
    Mat<Scalar> act = silu(pre);
    Mat<Scalar> y = out.forward(act);
    if (cache) {
      cache->input = x;
      cache->pre = std::move(pre);
      cache->act = std::move(act);
    }
    return y;
  }

  void backward(const Cache& c, const Mat<Scalar>& dy) {
    Mat<Scalar> dact = out.backward(c.act, dy);
    hidden.backward(c.input, silu_backward(c.pre, dact));
  }

  void collect(ParamList<Scalar>& out_list, const std::string& prefix) {
    hidden.collect(out_list, prefix + ".hidden");
    out.collect(out_list, prefix + ".out");
  }
};

/// Zero-corrected, masked residual m * (enc(log(1 + s v)) - enc(0)).
/// Exactly zero when v == 0 or m == 0, whatever the encoder weights are.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> timing_residual(Frames v, bool mask, const TimingEncoder<Scalar>& enc,
                                                         LogScale scale) {
  const Eigen::Index e = enc.out.weight.value.cols();
  if (!mask || v == 0) return RowVec<Scalar>::Zero(e);
  Mat<Scalar> x(2, 1);
  x << static_cast<Scalar>(log_compress(v, scale)), Scalar(0);
  Mat<Scalar> y = enc.forward(x, nullptr);
  RowVec<Scalar> r = y.row(0) - y.row(1);
  if (!r.allFinite()) throw NumericError("timing encoder produced a non-finite residual");
  return r;
}

/// e + alpha_d * d_res + alpha_p * p_res. A zero gate adds nothing, so the
/// result is bit-identical to e.
template <typename Scalar>
RowVec<Scalar> inject(const RowVec<Scalar>& e, const RowVec<Scalar>& d_res, const RowVec<Scalar>& p_res,
                      Scalar alpha_d, Scalar alpha_p) {
  if (d_res.size() != e.size() || p_res.size() != e.size())
    throw std::invalid_argument("inject: residual dimension does not match embedding dimension");
  RowVec<Scalar> out = e;
  if (alpha_d != Scalar(0)) out += alpha_d * d_res;
  if (alpha_p != Scalar(0)) out += alpha_p * p_res;
  return out;
}

struct ConditionConfig {
  int vocab = 16;
  int embed_dim = 64;
  int hidden_dim = 64;
  double log_scale_content = 1.0;
  double log_scale_pause = 1.0;
};

/// Token embeddings plus gated content and pause residuals.
template <typename Scalar>
struct ConditionNet {
  ConditionConfig config;
  Param<Scalar> embedding;  // vocab x E
  TimingEncoder<Scalar> content_enc, pause_enc;
  Param<Scalar> gate_content, gate_pause;  // 1 x 1, start at zero

  struct Branch {
    std::vector<Eigen::Index> rows;  // tokens with an active residual
    typename TimingEncoder<Scalar>::Cache enc;
    Mat<Scalar> residual;  // one row per active token
  };
  struct Cache {
    std::vector<TokenId> tokens;
    Branch content, pause;
  };

  ConditionNet() = default;
  explicit ConditionNet(const ConditionConfig& cfg)
      : config(cfg), content_enc(cfg.hidden_dim, cfg.embed_dim), pause_enc(cfg.hidden_dim, cfg.embed_dim) {
    embedding.resize(cfg.vocab, cfg.embed_dim);
    gate_content.resize(1, 1);
    gate_pause.resize(1, 1);
  }

  template <typename Rng>
  void init(Rng& rng) {
    fill_normal(embedding.value, Scalar(1), rng);
    content_enc.init(rng);
    pause_enc.init(rng);
    gate_content.value.setZero();
    gate_pause.value.setZero();
  }

  Scalar alpha_content() const { return gate_content.value(0, 0); }
  Scalar alpha_pause() const { return gate_pause.value(0, 0); }

  /// Conditioned embeddings, one row per token. A null track (or a fully
  /// masked one) yields the plain token embeddings.
  Mat<Scalar> forward(std::span<const TokenId> tokens, const TimingTrack* track, Cache* cache) const {
    const Eigen::Index n = static_cast<Eigen::Index>(tokens.size());
    if (track && track->size() != tokens.size())
      throw std::invalid_argument("condition: track length does not match token count");
    Mat<Scalar> out(n, config.embed_dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (tokens[i] < 0 || tokens[i] >= config.vocab)
        throw std::out_of_range("condition: token id " + std::to_string(tokens[i]) + " outside vocabulary");
      out.row(i) = embedding.value.row(tokens[i]);
    }
    Branch content, pause;
    if (track) {
      run_branch(*track, true, content_enc, LogScale(config.log_scale_content), content);
      run_branch(*track, false, pause_enc, LogScale(config.log_scale_pause), pause);
      const Scalar ad = alpha_content(), ap = alpha_pause();
      if (ad != Scalar(0))
        for (std::size_t k = 0; k < content.rows.size(); ++k) out.row(content.rows[k]) += ad * content.residual.row(k);
      if (ap != Scalar(0))
        for (std::size_t k = 0; k < pause.rows.size(); ++k) out.row(pause.rows[k]) += ap * pause.residual.row(k);
    }
    if (cache) {
      cache->tokens.assign(tokens.begin(), tokens.end());
      cache->content = std::move(content);
      cache->pause = std::move(pause);
    }
    return out;
  }

  /// Accumulates parameter gradients for upstream gradient d_out (n x E).
  void backward(const Cache& c, const Mat<Scalar>& d_out) {
    for (std::size_t i = 0; i < c.tokens.size(); ++i)
      embedding.grad.row(c.tokens[i]) += d_out.row(static_cast<Eigen::Index>(i));
    branch_backward(c.content, d_out, gate_content, content_enc);
    branch_backward(c.pause, d_out, gate_pause, pause_enc);
  }

  void collect(ParamList<Scalar>& out, const std::string& prefix) {
    out.push_back({prefix + ".embedding", &embedding});
    content_enc.collect(out, prefix + ".content_enc");
    pause_enc.collect(out, prefix + ".pause_enc");
    out.push_back({prefix + ".gate_content", &gate_content});
    out.push_back({prefix + ".gate_pause", &gate_pause});
  }

 private:
  // Encodes every active token plus one trailing zero input in a single
  // pass; the residual subtracts the zero row.
  static void run_branch(const TimingTrack& track, bool content_branch, const TimingEncoder<Scalar>& enc,
                         LogScale scale, Branch& b) {
    for (std::size_t i = 0; i < track.size(); ++i) {
      const auto& t = track.timings[i];
      const bool mask = content_branch ? t.content_mask : t.pause_mask;
      const Frames v = content_branch ? t.content : t.pause;
      if (mask && v > 0) b.rows.push_back(static_cast<Eigen::Index>(i));
    }
    if (b.rows.empty()) return;
    const Eigen::Index m = static_cast<Eigen::Index>(b.rows.size());
    Mat<Scalar> x = Mat<Scalar>::Zero(m + 1, 1);
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto& t = track.timings[static_cast<std::size_t>(b.rows[k])];
      x(k, 0) = static_cast<Scalar>(log_compress(content_branch ? t.content : t.pause, scale));
    }
    Mat<Scalar> y = enc.forward(x, &b.enc);
    b.residual = y.topRows(m).rowwise() - y.row(m);
    if (!b.residual.allFinite()) throw NumericError("timing encoder produced a non-finite residual");
  }

  static void branch_backward(const Branch& b, const Mat<Scalar>& d_out, Param<Scalar>& gate,
                              TimingEncoder<Scalar>& enc) {
    if (b.rows.empty()) return;
    const Eigen::Index m = static_cast<Eigen::Index>(b.rows.size());
    const Scalar alpha = gate.value(0, 0);
    Mat<Scalar> dy = Mat<Scalar>::Zero(m + 1, d_out.cols());
    Scalar dgate = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto g = d_out.row(b.rows[k]);
      dgate += g.dot(b.residual.row(k));
      dy.row(k) = alpha * g;
    }
    dy.row(m) = -dy.topRows(m).colwise().sum();
    gate.grad(0, 0) += dgate;
    enc.backward(b.enc, dy);
  }
};

/// Exponential moving average of |alpha| per branch:
/// ema <- lambda * ema + (1 - lambda) * |alpha|, seeded with the first value.
class GateTelemetry {
 public:
  explicit GateTelemetry(double smoothing = 0.6) : lambda_(smoothing) {
    if (!(smoothing >= 0.0 && smoothing < 1.0)) throw DomainError("smoothing must be in [0, 1)");
  }

  struct Row {
    long step;
    double abs_content, abs_pause, ema_content, ema_pause;
  };

  Row update(long step, double alpha_content, double alpha_pause) {
    if (last_step_ && step <= *last_step_) throw DomainError("telemetry steps must increase");
    const double ac = std::fabs(alpha_content), ap = std::fabs(alpha_pause);
    if (!last_step_) {
      ema_c_ = ac;
      ema_p_ = ap;
    } else {
      ema_c_ = lambda_ * ema_c_ + (1.0 - lambda_) * ac;
      ema_p_ = lambda_ * ema_p_ + (1.0 - lambda_) * ap;
    }
    last_step_ = step;
    return Row{step, ac, ap, ema_c_, ema_p_};
  }

  /// Restores state when resuming a run.
  void restore(long step, double ema_content, double ema_pause) {
    last_step_ = step;
    ema_c_ = ema_content;
    ema_p_ = ema_pause;
  }

  double ema_content() const { return ema_c_; }
  double ema_pause() const { return ema_p_; }

 private:
  double lambda_;
  std::optional<long> last_step_;
  double ema_c_ = 0.0, ema_p_ = 0.0;
};

}  // namespace tempo
