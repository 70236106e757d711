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

// Dense building blocks with explicit backward passes. Activations are
// T x D matrices (one row per frame or token). Forward passes are const and
// record what backward needs into a caller-owned cache, so frozen networks
// can be evaluated concurrently.

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace tempo {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
struct Param {
  Mat<Scalar> value;
  Mat<Scalar> grad;

  void resize(Eigen::Index rows, Eigen::Index cols) {
    value = Mat<Scalar>::Zero(rows, cols);
    grad = Mat<Scalar>::Zero(rows, cols);
  }
  void zero_grad() { grad.setZero(); }
};

template <typename Scalar>
struct NamedParam {
  std::string name;
  Param<Scalar>* param;
};

template <typename Scalar>
using ParamList = std::vector<NamedParam<Scalar>>;

template <typename Scalar, typename Rng>
void fill_normal(Mat<Scalar>& m, Scalar stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(dist(rng)) * stddev;
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

template <typename Derived>
auto silu(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return v * sigmoid(v); });
}

/// d silu / dx evaluated at x, multiplied elementwise into dy.
template <typename Scalar>
Mat<Scalar> silu_backward(const Mat<Scalar>& x, const Mat<Scalar>& dy) {
  return dy.binaryExpr(x, [](Scalar g, Scalar v) {
    const Scalar s = sigmoid(v);
    return g * s * (Scalar(1) + v * (Scalar(1) - s));
  });
}

/// y = x W + b.
template <typename Scalar>
struct Linear {
  Param<Scalar> weight;  // in x out
  Param<Scalar> bias;    // 1 x out
  bool has_bias = true;

  Linear() = default;
  Linear(Eigen::Index in, Eigen::Index out, bool with_bias = true) : has_bias(with_bias) {
    weight.resize(in, out);
    if (has_bias) bias.resize(1, out);
  }

  template <typename Rng>
  void init(Rng& rng, Scalar gain = Scalar(1)) {
    fill_normal(weight.value, gain / std::sqrt(Scalar(weight.value.rows())), rng);
    if (has_bias) bias.value.setZero();
  }

  Mat<Scalar> forward(const Mat<Scalar>& x) const {
    Mat<Scalar> y = x * weight.value;
    if (has_bias) y.rowwise() += bias.value.row(0);
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& x, const Mat<Scalar>& dy) {
    weight.grad.noalias() += x.transpose() * dy;
    if (has_bias) bias.grad += dy.colwise().sum();
    return dy * weight.value.transpose();
  }

  void collect(ParamList<Scalar>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight});
    if (has_bias) out.push_back({prefix + ".bias", &bias});
  }
};

/// Row-wise layer normalization with learned gain and shift.
template <typename Scalar>
struct LayerNorm {
  Param<Scalar> gain;  // 1 x D
  Param<Scalar> shift;
  Scalar eps = Scalar(1e-5);

  struct Cache {
    Mat<Scalar> xhat;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rstd;
  };

  LayerNorm() = default;
  explicit LayerNorm(Eigen::Index dim) {
    gain.resize(1, dim);
    gain.value.setOnes();
    shift.resize(1, dim);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache* cache) const {
    const Eigen::Index d = x.cols();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean = x.rowwise().mean();
    Mat<Scalar> xc = x.colwise() - mean;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rstd =
        ((xc.array().square().rowwise().sum() / Scalar(d)) + eps).rsqrt().matrix();
    Mat<Scalar> xhat = xc.array().colwise() * rstd.array();
    Mat<Scalar> y = (xhat.array().rowwise() * gain.value.row(0).array()).rowwise() + shift.value.row(0).array();
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->rstd = std::move(rstd);
    }
    return y;
  }

  Mat<Scalar> backward(const Cache& c, const Mat<Scalar>& dy) {
    const Scalar d = Scalar(dy.cols());
    gain.grad += (dy.array() * c.xhat.array()).colwise().sum().matrix();
    shift.grad += dy.colwise().sum();
    Mat<Scalar> dxhat = dy.array().rowwise() * gain.value.row(0).array();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m1 = dxhat.rowwise().sum() / d;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m2 = (dxhat.array() * c.xhat.array()).rowwise().sum().matrix() / d;
    Mat<Scalar> dx = (dxhat.colwise() - m1) - (c.xhat.array().colwise() * m2.array()).matrix();
    return dx.array().colwise() * c.rstd.array();
  }

  void collect(ParamList<Scalar>& out, const std::string& prefix) {
    out.push_back({prefix + ".gain", &gain});
    out.push_back({prefix + ".shift", &shift});
  }
};

/// Multi-head scaled dot-product self-attention over all rows.
template <typename Scalar>
struct SelfAttention {
  Linear<Scalar> query, key, value, output;
  int heads = 1;

  struct Cache {
    Mat<Scalar> x, q, k, v, mixed;
    std::vector<Mat<Scalar>> probs;  // one T x T matrix per head
  };

  SelfAttention() = default;
  SelfAttention(Eigen::Index dim, int num_heads)
      : query(dim, dim, false), key(dim, dim, false), value(dim, dim, false), output(dim, dim, true),
        heads(num_heads) {}

  template <typename Rng>
  void init(Rng& rng) {
    query.init(rng);
    key.init(rng);
    value.init(rng);
    output.init(rng);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache* cache) const {
    const Eigen::Index t = x.rows(), d = x.cols(), dh = d / heads;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));
    Mat<Scalar> q = query.forward(x), k = key.forward(x), v = value.forward(x);
    Mat<Scalar> mixed(t, d);
    if (cache) cache->probs.resize(heads);
    for (int h = 0; h < heads; ++h) {
      Mat<Scalar> s = (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) * scale;
      for (Eigen::Index i = 0; i < t; ++i) {
        const Scalar mx = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - mx).exp().matrix();
        s.row(i) /= s.row(i).sum();
      }
      mixed.middleCols(h * dh, dh).noalias() = s * v.middleCols(h * dh, dh);
      if (cache) cache->probs[h] = std::move(s);
    }
    Mat<Scalar> y = output.forward(mixed);
    if (cache) {
      cache->x = x;
      cache->q = std::move(q);
      cache->k = std::move(k);
      cache->v = std::move(v);
      cache->mixed = std::move(mixed);
    }
    return y;
  }

  Mat<Scalar> backward(const Cache& c, const Mat<Scalar>& dy) {
    const Eigen::Index t = c.x.rows(), d = c.x.cols(), dh = d / heads;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));
    Mat<Scalar> dmixed = output.backward(c.mixed, dy);
    Mat<Scalar> dq(t, d), dk(t, d), dv(t, d);
    for (int h = 0; h < heads; ++h) {
      const Mat<Scalar>& p = c.probs[h];
      const auto dmh = dmixed.middleCols(h * dh, dh);
      dv.middleCols(h * dh, dh).noalias() = p.transpose() * dmh;
      Mat<Scalar> dp = dmh * c.v.middleCols(h * dh, dh).transpose();
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rowdot = (dp.array() * p.array()).rowwise().sum().matrix();
      Mat<Scalar> ds = (p.array() * (dp.colwise() - rowdot).array()).matrix() * scale;
      dq.middleCols(h * dh, dh).noalias() = ds * c.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh).noalias() = ds.transpose() * c.q.middleCols(h * dh, dh);
    }
    Mat<Scalar> dx = query.backward(c.x, dq);
    dx += key.backward(c.x, dk);
    dx += value.backward(c.x, dv);
    return dx;
  }

  void collect(ParamList<Scalar>& out, const std::string& prefix) {
    query.collect(out, prefix + ".query");
    key.collect(out, prefix + ".key");
    value.collect(out, prefix + ".value");
    output.collect(out, prefix + ".output");
  }
};

/// Pre-norm transformer block: x + Attn(LN(x)), then + FF(LN(.)).
template <typename Scalar>
struct TransformerBlock {
  LayerNorm<Scalar> norm1, norm2;
  SelfAttention<Scalar> attn;
  Linear<Scalar> ff_in, ff_out;

  struct Cache {
    typename LayerNorm<Scalar>::Cache n1, n2;
    typename SelfAttention<Scalar>::Cache at;
    Mat<Scalar> a1, a2, pre, act;
  };

  TransformerBlock() = default;
  TransformerBlock(Eigen::Index dim, int heads, int ff_mult)
      : norm1(dim), norm2(dim), attn(dim, heads), ff_in(dim, dim * ff_mult), ff_out(dim * ff_mult, dim) {}

  template <typename Rng>
  void init(Rng& rng) {
    attn.init(rng);
    ff_in.init(rng);
    ff_out.init(rng);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache* cache) const {
    typename LayerNorm<Scalar>::Cache n1, n2;
    typename SelfAttention<Scalar>::Cache at;
    Mat<Scalar> a1 = norm1.forward(x, cache ? &n1 : nullptr);
    Mat<Scalar> mid = x + attn.forward(a1, cache ? &at : nullptr);
    Mat<Scalar> a2 = norm2.forward(mid, cache ? &n2 : nullptr);
    Mat<Scalar> pre = ff_in.forward(a2);
    Mat<Scalar> act = silu(pre);
    Mat<Scalar> y = mid + ff_out.forward(act);
    if (cache) {
      cache->n1 = std::move(n1);
      cache->n2 = std::move(n2);
      cache->at = std::move(at);
      cache->a1 = std::move(a1);
      cache->a2 = std::move(a2);
      cache->pre = std::move(pre);
      cache->act = std::move(act);
    }
    return y;
  }

  Mat<Scalar> backward(const Cache& c, const Mat<Scalar>& dy) {
    Mat<Scalar> dact = ff_out.backward(c.act, dy);
    Mat<Scalar> dpre = silu_backward(c.pre, dact);
    Mat<Scalar> da2 = ff_in.backward(c.a2, dpre);
    Mat<Scalar> dmid = dy + norm2.backward(c.n2, da2);
    Mat<Scalar> da1 = attn.backward(c.at, dmid);
    return dmid + norm1.backward(c.n1, da1);
  }

  void collect(ParamList<Scalar>& out, const std::string& prefix) {
    norm1.collect(out, prefix + ".norm1");
    attn.collect(out, prefix + ".attn");
    norm2.collect(out, prefix + ".norm2");
    ff_in.collect(out, prefix + ".ff_in");
    ff_out.collect(out, prefix + ".ff_out");
  }
};

/// Sinusoidal features [sin(x w_k), cos(x w_k)] for geometric frequencies
/// between 1/min_period and 1/max_period (in cycles per unit).
template <typename Scalar>
RowVec<Scalar> sinusoid(double x, int dim, double min_period, double max_period) {
  const int half = dim / 2;
  RowVec<Scalar> out(dim);
  for (int k = 0; k < half; ++k) {
    const double frac = half > 1 ? double(k) / double(half - 1) : 0.0;
    const double period = min_period * std::pow(max_period / min_period, frac);
    const double w = 2.0 * std::numbers::pi / period;
    out(k) = static_cast<Scalar>(std::sin(x * w));
    out(half + k) = static_cast<Scalar>(std::cos(x * w));
  }
  return out;
}

}  // namespace tempo
