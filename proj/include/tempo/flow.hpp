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

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tempo/condition.hpp"
#include "tempo/errors.hpp"
#include "tempo/nn.hpp"
#include "tempo/rng.hpp"
#include "tempo/track.hpp"
#include "tempo/track_build.hpp"

namespace tempo {

// ---------------------------------------------------------------------------
// Flow-matching arithmetic

template <typename Scalar>
Mat<Scalar> interpolate(const Mat<Scalar>& x0, const Mat<Scalar>& x1, Scalar t) {
  if (x0.rows() != x1.rows() || x0.cols() != x1.cols()) throw std::invalid_argument("interpolate: shape mismatch");
  if (!(t >= Scalar(0) && t <= Scalar(1))) throw DomainError("interpolate: t outside [0, 1]");
  return (Scalar(1) - t) * x0 + t * x1;
}

template <typename Scalar>
Mat<Scalar> target_flow(const Mat<Scalar>& x0, const Mat<Scalar>& x1) {
  if (x0.rows() != x1.rows() || x0.cols() != x1.cols()) throw std::invalid_argument("target_flow: shape mismatch");
  return x1 - x0;
}

/// Per-frame {0,1} gate over a FeatureSeq.
using AcousticMask = std::vector<std::uint8_t>;

template <typename Scalar>
struct CfmLoss {
  Scalar value = 0;
  bool empty_mask = false;
};

/// Mean over masked frames of the squared L2 error summed over channels.
template <typename Scalar>
CfmLoss<Scalar> cfm_loss(const Mat<Scalar>& pred, const Mat<Scalar>& u, const AcousticMask& mask) {
  if (pred.rows() != u.rows() || pred.cols() != u.cols() || static_cast<Eigen::Index>(mask.size()) != u.rows())
    throw std::invalid_argument("cfm_loss: shape mismatch");
  CfmLoss<Scalar> out;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    out.value += (pred.row(i) - u.row(i)).squaredNorm();
    ++count;
  }
  if (count == 0) {
    out.empty_mask = true;
    out.value = 0;
  } else {
    out.value /= Scalar(count);
  }
  return out;
}

template <typename Scalar>
Mat<Scalar> cfm_loss_grad(const Mat<Scalar>& pred, const Mat<Scalar>& u, const AcousticMask& mask) {
  Mat<Scalar> g = Mat<Scalar>::Zero(u.rows(), u.cols());
  const auto count = std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; });
  if (count == 0) return g;
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    if (mask[static_cast<std::size_t>(i)]) g.row(i) = (Scalar(2) / Scalar(count)) * (pred.row(i) - u.row(i));
  return g;
}

// ---------------------------------------------------------------------------
// Token-to-frame layout

/// Which token each frame belongs to and the frame's offset from that
/// token's first frame.
struct FrameLayout {
  std::vector<int> token;
  std::vector<int> offset;
  std::vector<Frames> lengths;  // frames per token
  Frames total() const { return static_cast<Frames>(token.size()); }
};

/// Tokens whose content and pause are both available span d + p frames;
/// the rest share the remaining frames evenly (largest remainder). With no
/// track, or a fully masked one, every token is spread evenly over `total`.
/// `total` may be omitted only when the track is fully available.
inline FrameLayout make_layout(std::size_t n_tokens, const TimingTrack* track, std::optional<Frames> total) {
  if (track && track->size() != n_tokens) throw std::invalid_argument("layout: track length does not match tokens");
  std::vector<Frames> lengths(n_tokens, 0);
  std::vector<std::size_t> unknown;
  Frames known = 0;
  for (std::size_t i = 0; i < n_tokens; ++i) {
    const bool avail = track && track->timings[i].content_mask && track->timings[i].pause_mask;
    if (avail) {
      lengths[i] = track->timings[i].content + track->timings[i].pause;
      known += lengths[i];
    } else {
      unknown.push_back(i);
    }
  }
  if (!total) {
    if (!unknown.empty()) throw std::invalid_argument("layout: total length required when timing is incomplete");
    total = known;
  }
  if (*total < 0) throw std::invalid_argument("layout: negative length");
  const Frames rest = *total - known;
  if (rest < 0) throw std::invalid_argument("layout: track span exceeds requested length");
  if (unknown.empty() && rest != 0) throw std::invalid_argument("layout: track span differs from requested length");
  if (n_tokens == 0 && *total > 0) throw std::invalid_argument("layout: frames without tokens");
  if (!unknown.empty()) {
    const auto split = largest_remainder_split(rest, std::vector<std::size_t>(unknown.size(), 1));
    for (std::size_t k = 0; k < unknown.size(); ++k) lengths[unknown[k]] = split[k];
  }
  FrameLayout layout;
  layout.lengths = lengths;
  layout.token.reserve(static_cast<std::size_t>(*total));
  layout.offset.reserve(static_cast<std::size_t>(*total));
  for (std::size_t i = 0; i < n_tokens; ++i)
    for (Frames k = 0; k < lengths[i]; ++k) {
      layout.token.push_back(static_cast<int>(i));
      layout.offset.push_back(static_cast<int>(k));
    }
  return layout;
}

// ---------------------------------------------------------------------------
// Generator

struct ModelConfig {
  int features = 8;
  int width = 64;
  int heads = 4;
  int blocks = 4;
  int ff_mult = 2;
  int time_dim = 32;
  int offset_dim = 8;  // sinusoidal part; one linear ramp channel is appended
  ConditionConfig condition;

  int input_dim() const { return 2 * features + 1 + offset_dim + 1; }
};

/// Fixed per-frame features describing the frame's offset within its token.
template <typename Scalar>
Mat<Scalar> offset_features(const FrameLayout& layout, int offset_dim) {
  Mat<Scalar> out(layout.total(), offset_dim + 1);
  for (Eigen::Index j = 0; j < out.rows(); ++j) {
    const double o = layout.offset[static_cast<std::size_t>(j)];
    out.row(j).head(offset_dim) = sinusoid<Scalar>(o, offset_dim, 4.0, 64.0);
    out(j, offset_dim) = static_cast<Scalar>(o / 32.0);
  }
  return out;
}

template <typename Scalar>
RowVec<Scalar> time_features(Scalar t, int dim) {
  return sinusoid<Scalar>(static_cast<double>(t), dim, 0.01, 4.0);
}

template <typename Scalar>
struct GeneratorInput {
  Mat<Scalar> x_t;                  // T x F
  Scalar t = 0;
  Mat<Scalar> context;              // T x F, zero where absent
  std::vector<std::uint8_t> context_mask;
  Mat<Scalar> cond;                 // T x E, token conditions upsampled to frames
  Mat<Scalar> offsets;              // T x (offset_dim + 1)
};

/// v(x_t, t | c, h): input projection, time embedding, transformer stack,
/// output projection back to feature channels.
template <typename Scalar>
struct GeneratorNet {
  ModelConfig config;
  Linear<Scalar> in_proj, cond_proj, time_in, time_out, out_proj;
  std::vector<TransformerBlock<Scalar>> blocks;
  LayerNorm<Scalar> final_norm;

  struct Cache {
    Mat<Scalar> feat, cond, tfeat, tpre, tact, zf;
    std::vector<typename TransformerBlock<Scalar>::Cache> blocks;
    typename LayerNorm<Scalar>::Cache fn;
  };

  GeneratorNet() = default;
  explicit GeneratorNet(const ModelConfig& cfg)
      : config(cfg),
        in_proj(cfg.input_dim(), cfg.width),
        cond_proj(cfg.condition.embed_dim, cfg.width, false),
        time_in(cfg.time_dim, cfg.width),
        time_out(cfg.width, cfg.width),
        out_proj(cfg.width, cfg.features),
        final_norm(cfg.width) {
    if (cfg.width % cfg.heads != 0) throw std::invalid_argument("width must be divisible by heads");
    for (int b = 0; b < cfg.blocks; ++b) blocks.emplace_back(cfg.width, cfg.heads, cfg.ff_mult);
  }

  template <typename Rng>
  void init(Rng& rng) {
    in_proj.init(rng);
    cond_proj.init(rng);
    time_in.init(rng);
    time_out.init(rng);
    for (auto& b : blocks) b.init(rng);
    out_proj.init(rng);
  }

  Mat<Scalar> forward(const GeneratorInput<Scalar>& in, Cache* cache) const {
    const Eigen::Index T = in.x_t.rows(), F = config.features;
    Mat<Scalar> feat(T, config.input_dim());
    feat.leftCols(F) = in.x_t;
    feat.middleCols(F, F) = in.context;
    for (Eigen::Index j = 0; j < T; ++j) feat(j, 2 * F) = in.context_mask[static_cast<std::size_t>(j)] ? Scalar(1) : Scalar(0);
    feat.rightCols(config.offset_dim + 1) = in.offsets;

    Mat<Scalar> tfeat = time_features(in.t, config.time_dim);
    Mat<Scalar> tpre = time_in.forward(tfeat);
    Mat<Scalar> tact = silu(tpre);
    Mat<Scalar> temb = time_out.forward(tact);

    Mat<Scalar> z = in_proj.forward(feat) + cond_proj.forward(in.cond);
    z.rowwise() += temb.row(0);
    if (cache) cache->blocks.resize(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) z = blocks[b].forward(z, cache ? &cache->blocks[b] : nullptr);
    typename LayerNorm<Scalar>::Cache fn;
    Mat<Scalar> zf = final_norm.forward(z, cache ? &fn : nullptr);
    Mat<Scalar> out = out_proj.forward(zf);
    if (cache) {
      cache->feat = std::move(feat);
      cache->cond = in.cond;
      cache->tfeat = std::move(tfeat);
      cache->tpre = std::move(tpre);
      cache->tact = std::move(tact);
      cache->zf = std::move(zf);
      cache->fn = std::move(fn);
    }
    return out;
  }

  /// Accumulates parameter gradients; returns the gradient w.r.t. `cond`.
  Mat<Scalar> backward(const Cache& c, const Mat<Scalar>& dout) {
    Mat<Scalar> dz = final_norm.backward(c.fn, out_proj.backward(c.zf, dout));
    for (std::size_t b = blocks.size(); b-- > 0;) dz = blocks[b].backward(c.blocks[b], dz);
    in_proj.backward(c.feat, dz);
    Mat<Scalar> dcond = cond_proj.backward(c.cond, dz);
    Mat<Scalar> dtemb = dz.colwise().sum();
    Mat<Scalar> dtact = time_out.backward(c.tact, dtemb);
    time_in.backward(c.tfeat, silu_backward(c.tpre, dtact));
    return dcond;
  }

  void collect(ParamList<Scalar>& out, const std::string& prefix) {
    in_proj.collect(out, prefix + ".in_proj");
    cond_proj.collect(out, prefix + ".cond_proj");
    time_in.collect(out, prefix + ".time_in");
    time_out.collect(out, prefix + ".time_out");
    for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b].collect(out, prefix + ".block" + std::to_string(b));
    final_norm.collect(out, prefix + ".final_norm");
    out_proj.collect(out, prefix + ".out_proj");
  }
};

/// Condition network and generator trained together.
template <typename Scalar>
struct FlowModel {
  ModelConfig config;
  ConditionNet<Scalar> condition;
  GeneratorNet<Scalar> generator;

  FlowModel() = default;
  explicit FlowModel(const ModelConfig& cfg) : config(cfg), condition(cfg.condition), generator(cfg) {
    if (cfg.condition.embed_dim <= 0 || cfg.features <= 0) throw std::invalid_argument("bad model dimensions");
  }

  void init(std::uint64_t seed) {
    Rng rng(stream_key(seed, "init"));
    condition.init(rng);
    generator.init(rng);
  }

  ParamList<Scalar> params() {
    ParamList<Scalar> out;
    condition.collect(out, "cond");
    generator.collect(out, "gen");
    return out;
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (auto& p : params()) n += static_cast<std::size_t>(p.param->value.size());
    return n;
  }

  void zero_grad() {
    for (auto& p : params()) p.param->zero_grad();
  }
};

/// Everything needed to evaluate the flow field for one utterance except
/// the state x_t and time t.
template <typename Scalar>
struct FlowConditioning {
  FrameLayout layout;
  Mat<Scalar> token_cond;  // N x E conditioned embeddings
  Mat<Scalar> frame_cond;  // T x E
  Mat<Scalar> offsets;
  Mat<Scalar> context;     // T x F
  std::vector<std::uint8_t> context_mask;
  typename ConditionNet<Scalar>::Cache cond_cache;
};

/// `context` holds the first P frames of acoustic context (P may be 0).
template <typename Scalar>
FlowConditioning<Scalar> make_conditioning(const FlowModel<Scalar>& model, std::span<const TokenId> tokens,
                                           const TimingTrack* track, const Mat<Scalar>& context,
                                           std::optional<Frames> total, bool keep_cache) {
  FlowConditioning<Scalar> fc;
  fc.layout = make_layout(tokens.size(), track, total);
  const Eigen::Index T = static_cast<Eigen::Index>(fc.layout.total());
  const Eigen::Index F = model.config.features;
  if (context.rows() > T) throw std::invalid_argument("context longer than the utterance");
  if (context.rows() > 0 && context.cols() != F) throw std::invalid_argument("context feature width mismatch");
  fc.token_cond = model.condition.forward(tokens, track, keep_cache ? &fc.cond_cache : nullptr);
  fc.frame_cond.resize(T, fc.token_cond.cols());
  for (Eigen::Index j = 0; j < T; ++j) fc.frame_cond.row(j) = fc.token_cond.row(fc.layout.token[static_cast<std::size_t>(j)]);
  fc.offsets = offset_features<Scalar>(fc.layout, model.config.offset_dim);
  fc.context = Mat<Scalar>::Zero(T, F);
  fc.context_mask.assign(static_cast<std::size_t>(T), 0);
  for (Eigen::Index j = 0; j < context.rows(); ++j) {
    fc.context.row(j) = context.row(j);
    fc.context_mask[static_cast<std::size_t>(j)] = 1;
  }
  return fc;
}

template <typename Scalar>
GeneratorInput<Scalar> generator_input(const FlowConditioning<Scalar>& fc, const Mat<Scalar>& x_t, Scalar t) {
  return GeneratorInput<Scalar>{x_t, t, fc.context, fc.context_mask, fc.frame_cond, fc.offsets};
}

template <typename Scalar, typename Rng>
Mat<Scalar> standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat<Scalar> m(rows, cols);
  fill_normal(m, Scalar(1), rng);
  return m;
}

/// Fixed-step Euler integration of the learned field from noise at t = 0 to
/// t = 1. Context frames are copied into the result. Controlled mode takes
/// its length from the track; otherwise `total` is required.
template <typename Scalar>
Mat<Scalar> sample(const FlowModel<Scalar>& model, std::span<const TokenId> tokens, const TimingTrack* track,
                   const Mat<Scalar>& context, std::optional<Frames> total, int steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("sample: steps must be >= 1");
  const auto fc = make_conditioning(model, tokens, track, context, total, false);
  const Eigen::Index T = static_cast<Eigen::Index>(fc.layout.total());
  Rng rng(stream_key(seed, "sample-noise"));
  Mat<Scalar> x = standard_normal<Scalar>(T, model.config.features, rng);
  const Scalar dt = Scalar(1) / Scalar(steps);
  for (int k = 0; k < steps; ++k) {
    const Scalar t = Scalar(k) / Scalar(steps);
    Mat<Scalar> v = model.generator.forward(generator_input(fc, x, t), nullptr);
    if (!v.allFinite()) throw NumericError("sample: non-finite flow field");
    x += dt * v;
  }
  for (Eigen::Index j = 0; j < context.rows(); ++j) x.row(j) = context.row(j);
  return x;
}

// ---------------------------------------------------------------------------
// Training

/// One fully specified CFM training instance.
template <typename Scalar>
struct FlowSample {
  std::vector<TokenId> tokens;
  TimingTrack track;  // possibly masked
  Mat<Scalar> x1;     // T x F target
  Mat<Scalar> x0;     // T x F noise
  Scalar t = 0;
  Eigen::Index context_frames = 0;  // unmasked prefix given as context
};

template <typename Scalar>
AcousticMask loss_mask(const FlowSample<Scalar>& s) {
  AcousticMask m(static_cast<std::size_t>(s.x1.rows()), 0);
  for (Eigen::Index j = s.context_frames; j < s.x1.rows(); ++j) m[static_cast<std::size_t>(j)] = 1;
  return m;
}

/// CFM loss for one sample. When `grad_scale` is nonzero, parameter
/// gradients of grad_scale * loss are accumulated into the model.
template <typename Scalar>
Scalar flow_sample_loss(FlowModel<Scalar>& model, const FlowSample<Scalar>& s, Scalar grad_scale) {
  const bool want_grad = grad_scale != Scalar(0);
  const Mat<Scalar> context = s.x1.topRows(s.context_frames);
  const TimingTrack* track = s.track.any_available() ? &s.track : nullptr;
  auto fc = make_conditioning(model, s.tokens, track, context, static_cast<Frames>(s.x1.rows()), want_grad);
  const Mat<Scalar> xt = interpolate(s.x0, s.x1, s.t);
  const Mat<Scalar> u = target_flow(s.x0, s.x1);
  const AcousticMask mask = loss_mask(s);
  typename GeneratorNet<Scalar>::Cache cache;
  const Mat<Scalar> pred = model.generator.forward(generator_input(fc, xt, s.t), want_grad ? &cache : nullptr);
  const auto loss = cfm_loss(pred, u, mask);
  if (!std::isfinite(static_cast<double>(loss.value))) throw NumericError("non-finite training loss");
  if (want_grad) {
    const Mat<Scalar> dpred = grad_scale * cfm_loss_grad(pred, u, mask);
    const Mat<Scalar> dframe = model.generator.backward(cache, dpred);
    Mat<Scalar> dtoken = Mat<Scalar>::Zero(fc.token_cond.rows(), fc.token_cond.cols());
    for (Eigen::Index j = 0; j < dframe.rows(); ++j) dtoken.row(fc.layout.token[static_cast<std::size_t>(j)]) += dframe.row(j);
    model.condition.backward(fc.cond_cache, dtoken);
  }
  return loss.value;
}

struct OptimizerConfig {
  enum class Kind { sgd_momentum, adam };
  Kind kind = Kind::adam;
  double lr = 1e-3;
  double momentum = 0.9;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long warmup = 200;
  double clip_norm = 1.0;  // <= 0 disables clipping
};

/// SGD with momentum or Adam, with linear warmup and global-norm clipping.
template <typename Scalar>
struct Optimizer {
  OptimizerConfig config;
  std::vector<Mat<Scalar>> first, second;
  long step = 0;

  explicit Optimizer(const OptimizerConfig& cfg = {}) : config(cfg) {}

  double learning_rate(long at_step) const {
    if (config.warmup <= 0) return config.lr;
    return config.lr * std::min(1.0, double(at_step) / double(config.warmup));
  }

  /// Applies one update from the accumulated gradients; returns the
  /// pre-clipping gradient norm.
  double apply(const ParamList<Scalar>& params) {
    if (first.empty()) {
      for (const auto& p : params) {
        first.push_back(Mat<Scalar>::Zero(p.param->value.rows(), p.param->value.cols()));
        second.push_back(Mat<Scalar>::Zero(p.param->value.rows(), p.param->value.cols()));
      }
    }
    if (first.size() != params.size()) throw std::logic_error("optimizer state does not match parameters");
    double sq = 0.0;
    for (const auto& p : params) sq += static_cast<double>(p.param->grad.squaredNorm());
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
    const Scalar clip = (config.clip_norm > 0 && norm > config.clip_norm) ? Scalar(config.clip_norm / norm) : Scalar(1);
    ++step;
    const Scalar lr = static_cast<Scalar>(learning_rate(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& p = *params[i].param;
      const Mat<Scalar> g = p.grad * clip;
      if (config.kind == OptimizerConfig::Kind::sgd_momentum) {
        first[i] = Scalar(config.momentum) * first[i] + g;
        p.value -= lr * first[i];
      } else {
        const Scalar b1 = Scalar(config.beta1), b2 = Scalar(config.beta2);
        first[i] = b1 * first[i] + (Scalar(1) - b1) * g;
        second[i] = b2 * second[i] + (Scalar(1) - b2) * g.cwiseProduct(g);
        const Scalar c1 = Scalar(1) - std::pow(b1, Scalar(step));
        const Scalar c2 = Scalar(1) - std::pow(b2, Scalar(step));
        p.value.array() -= lr * (first[i].array() / c1) / ((second[i].array() / c2).sqrt() + Scalar(config.eps));
      }
    }
    return norm;
  }
};

}  // namespace tempo
