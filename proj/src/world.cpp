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

#include "tempo/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "tempo/errors.hpp"
#include "tempo/rng.hpp"

namespace tempo {

void WorldConfig::validate() const {
  if (vocab < 1 || features < 1) throw DomainError("world: vocab and features must be positive");
  if (content_min < 1 || content_min > content_max) throw DomainError("world: bad content duration prior");
  if (pause_min < 0 || pause_min > pause_max) throw DomainError("world: bad pause prior");
  if (!(pause_prob >= 0.0 && pause_prob <= 1.0)) throw DomainError("world: pause probability outside [0, 1]");
  if (tokens_min < 1 || tokens_min > tokens_max) throw DomainError("world: bad utterance length prior");
  if (!(noise_std >= 0.0)) throw DomainError("world: negative noise");
}

World::World(const WorldConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(stream_key(cfg.signature_seed, "signatures"));
  std::normal_distribution<double> normal(0.0, 1.0);
  signatures_.resize(cfg.vocab, cfg.features);
  int accepted = 0;
  for (long attempt = 0; accepted < cfg.vocab; ++attempt) {
    if (attempt > 1000000) throw DomainError("world: cannot place signatures under the similarity bound");
    Eigen::RowVectorXd v(cfg.features);
    for (int k = 0; k < cfg.features; ++k) v(k) = normal(rng);
    v.normalize();
    bool ok = true;
    for (int j = 0; j < accepted && ok; ++j) ok = v.dot(signatures_.row(j)) <= cfg.max_signature_cosine;
    if (ok) signatures_.row(accepted++) = v;
  }
  silence_norm_ = cfg.silence_threshold * signatures_.rowwise().norm().mean();
}

FeatureSeq World::render(const TimingTrack& track, std::uint64_t seed, std::optional<double> noise_std) const {
  validate(track);
  const double sigma = noise_std.value_or(cfg_.noise_std);
  const Frames total = track_total_span(track);
  FeatureSeq out = FeatureSeq::Zero(total, cfg_.features);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < track.size(); ++i) {
    const TokenId id = track.tokens[i];
    if (id < 0 || id >= cfg_.vocab) throw DomainError("render: unknown token id " + std::to_string(id));
    for (Frames k = 0; k < track.timings[i].content; ++k) out.row(row++) = signatures_.row(id);
    row += track.timings[i].pause;
  }
  if (sigma > 0.0) {
    Rng rng(stream_key(seed, "render-noise"));
    std::normal_distribution<double> normal(0.0, sigma);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) += normal(rng);
  }
  return out;
}

std::vector<int> World::classify(const FeatureSeq& feat) const {
  if (feat.cols() != cfg_.features) throw DomainError("classify: feature width mismatch");
  std::vector<int> labels(static_cast<std::size_t>(feat.rows()), -1);
  for (Eigen::Index r = 0; r < feat.rows(); ++r) {
    if (!feat.row(r).allFinite()) throw NumericError("classify: non-finite frame");
    if (feat.row(r).norm() < silence_norm_) continue;
    Eigen::Index best = 0;
    (signatures_ * feat.row(r).transpose()).maxCoeff(&best);
    labels[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return labels;
}

AlignResult oracle_align(const FeatureSeq& feat, const std::vector<TokenId>& tokens, const World& world,
                         FrameRate rate, const AlignOptions& opts) {
  AlignResult res;
  res.track.rate = rate;
  const std::size_t n = tokens.size();
  const std::size_t T = static_cast<std::size_t>(feat.rows());
  if (n == 0) {
    res.failure = "no tokens";
    return res;
  }
  if (T < n) {
    res.failure = "fewer frames than tokens";
    return res;
  }
  for (TokenId t : tokens)
    if (t < 0 || t >= world.config().vocab) throw DomainError("oracle_align: unknown token id " + std::to_string(t));
  const auto labels = world.classify(feat);
  if (std::all_of(labels.begin(), labels.end(), [](int l) { return l < 0; })) {
    res.failure = "no speech frames";
    return res;
  }

  // State 0: leading silence; 1 + 2i: content of token i; 2 + 2i: pause after it.
  // A frame costs 1 when misclassified, plus a tie-breaking term in [0, 1/T)
  // from its squared distance to the state's template (silence or the
  // token's signature), so the path minimizes misclassified frames first.
  const std::size_t S = 1 + 2 * n;
  const double inf = std::numeric_limits<double>::infinity();
  const double tie_scale = 1.0 / double(T + 1);
  const auto& sig = world.signatures();
  const Eigen::VectorXd sq_norm = feat.rowwise().squaredNorm();
  auto soft = [&](double d2) { return tie_scale * d2 / (d2 + 1.0); };
  auto cost = [&](std::size_t j, std::size_t s) -> double {
    const int l = labels[j];
    if (s == 0 || s % 2 == 0) return (l >= 0 ? 1.0 : 0.0) + soft(sq_norm(Eigen::Index(j)));
    const TokenId tok = tokens[(s - 1) / 2];
    const double d2 = (feat.row(Eigen::Index(j)) - sig.row(tok)).squaredNorm();
    return (l == tok ? 0.0 : 1.0) + soft(d2);
  };
  std::vector<double> dp(S, inf), next(S);
  std::vector<std::uint32_t> back(T * S, 0);
  dp[0] = cost(0, 0);
  dp[1] = cost(0, 1);
  back[0] = 0;
  back[1] = 1;
  for (std::size_t j = 1; j < T; ++j) {
    std::uint32_t* bp = &back[j * S];
    next[0] = dp[0] + cost(j, 0);
    bp[0] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = 1 + 2 * i, p = 2 + 2 * i;
      // Candidates in preference order: stay, then the earliest-boundary entry.
      double best = dp[c];
      std::size_t arg = c;
      if (i == 0) {
        if (dp[0] < best) best = dp[0], arg = 0;
      } else {
        if (dp[c - 1] < best) best = dp[c - 1], arg = c - 1;  // from pause of i-1
        if (dp[c - 2] < best) best = dp[c - 2], arg = c - 2;  // straight from content of i-1
      }
      next[c] = best + cost(j, c);
      bp[c] = static_cast<std::uint32_t>(arg);
      double pbest = dp[p];
      std::size_t parg = p;
      if (dp[c] < pbest) pbest = dp[c], parg = c;
      next[p] = pbest + cost(j, p);
      bp[p] = static_cast<std::uint32_t>(parg);
    }
    dp.swap(next);
  }
  std::size_t state = dp[S - 1] <= dp[S - 2] ? S - 1 : S - 2;
  const double total_cost = std::floor(dp[state]);
  std::vector<std::uint32_t> path(T);
  for (std::size_t j = T; j-- > 0;) {
    path[j] = static_cast<std::uint32_t>(state);
    state = back[j * S + state];
  }

  res.track.tokens = tokens;
  res.track.timings.assign(n, TokenTiming{});
  for (std::size_t j = 0; j < T; ++j) {
    const std::size_t s = path[j];
    if (s == 0) ++res.leading_silence;
    else if (s % 2 == 1) ++res.track.timings[(s - 1) / 2].content;
    else ++res.track.timings[(s - 2) / 2].pause;
  }
  res.mismatch_rate = total_cost / double(T);
  if (res.mismatch_rate > opts.max_mismatch) {
    res.failure = "too many misclassified frames";
    return res;
  }
  res.ok = true;
  return res;
}

std::vector<Frames> token_onsets(const AlignResult& r) {
  std::vector<Frames> on;
  Frames cursor = r.leading_silence;
  for (const auto& t : r.track.timings) {
    on.push_back(cursor);
    cursor += t.content + t.pause;
  }
  return on;
}

std::vector<Utterance> gen_corpus(const WorldConfig& world, std::size_t n_utts, std::size_t n_heldout,
                                  std::uint64_t seed, FrameRate rate) {
  world.validate();
  if (n_utts < 1) throw DomainError("gen_corpus: need at least one utterance");
  if (n_heldout > n_utts) throw DomainError("gen_corpus: more held-out utterances than utterances");
  std::vector<Utterance> out;
  out.reserve(n_utts);
  for (std::size_t u = 0; u < n_utts; ++u) {
    Rng rng = make_rng(seed, u);
    std::uniform_int_distribution<int> len(world.tokens_min, world.tokens_max);
    std::uniform_int_distribution<int> tok(0, world.vocab - 1);
    std::uniform_int_distribution<Frames> dur(world.content_min, world.content_max);
    std::uniform_int_distribution<Frames> pau(world.pause_min, world.pause_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> word_len(1, 3);

    Utterance utt;
    char id[32];
    std::snprintf(id, sizeof(id), "utt%05zu", u);
    utt.id = id;
    utt.heldout = u >= n_utts - n_heldout;
    utt.track.rate = rate;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      TokenId t = tok(rng);
      if (world.vocab > 1)
        while (!utt.track.tokens.empty() && t == utt.track.tokens.back()) t = tok(rng);
      TokenTiming timing;
      timing.content = dur(rng);
      timing.pause = unit(rng) < world.pause_prob ? pau(rng) : 0;
      utt.track.tokens.push_back(t);
      utt.track.timings.push_back(timing);
    }
    std::size_t end = 0;
    while (end < static_cast<std::size_t>(n)) {
      end = std::min<std::size_t>(static_cast<std::size_t>(n), end + static_cast<std::size_t>(word_len(rng)));
      utt.word_ends.push_back(end);
    }
    out.push_back(std::move(utt));
  }
  return out;
}

std::string encode_features(const FeatureSeq& f) {
  std::string out(16 + static_cast<std::size_t>(f.size()) * 4, '\0');
  const std::int64_t t = f.rows(), c = f.cols();
  std::memcpy(out.data(), &t, 8);
  std::memcpy(out.data() + 8, &c, 8);
  char* p = out.data() + 16;
  for (Eigen::Index r = 0; r < f.rows(); ++r)
    for (Eigen::Index k = 0; k < f.cols(); ++k) {
      const float v = static_cast<float>(f(r, k));
      std::memcpy(p, &v, 4);
      p += 4;
    }
  return out;
}

FeatureSeq decode_features(std::string_view bytes) {
  if (bytes.size() < 16) throw ParseError("feature file too short for header");
  std::int64_t t = 0, c = 0;
  std::memcpy(&t, bytes.data(), 8);
  std::memcpy(&c, bytes.data() + 8, 8);
  if (t < 0 || c < 0 || static_cast<std::size_t>(t * c) * 4 + 16 != bytes.size())
    throw ParseError("feature file size does not match its header");
  FeatureSeq f(t, c);
  const char* p = bytes.data() + 16;
  for (Eigen::Index r = 0; r < t; ++r)
    for (Eigen::Index k = 0; k < c; ++k) {
      float v = 0;
      std::memcpy(&v, p, 4);
      p += 4;
      f(r, k) = v;
    }
  return f;
}

}  // namespace tempo
