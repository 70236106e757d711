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

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tempo/track.hpp"

namespace tempo {

/// T x F frames, one row per acoustic frame.
using FeatureSeq = Eigen::MatrixXd;

struct WorldConfig {
  int vocab = 16;
  int features = 8;
  Frames content_min = 4, content_max = 20;
  double pause_prob = 0.3;
  Frames pause_min = 3, pause_max = 30;
  int tokens_min = 5, tokens_max = 10;
  double noise_std = 0.05;
  /// Frames whose norm is below this fraction of the mean signature norm
  /// are silence.
  double silence_threshold = 0.25;
  double max_signature_cosine = 0.3;
  std::uint64_t signature_seed = 7;

  void validate() const;
};

/// Unit-norm signature patterns, one row per token id.
class World {
 public:
  explicit World(const WorldConfig& cfg);

  const WorldConfig& config() const { return cfg_; }
  const Eigen::MatrixXd& signatures() const { return signatures_; }

  /// Signature frames followed by silence frames per token, plus Gaussian
  /// noise of std noise_std (or `noise_std` when given).
  FeatureSeq render(const TimingTrack& track, std::uint64_t seed, std::optional<double> noise_std = {}) const;

  /// Per-frame label: token id of the nearest signature, or -1 for silence.
  std::vector<int> classify(const FeatureSeq& feat) const;

 private:
  WorldConfig cfg_;
  Eigen::MatrixXd signatures_;
  double silence_norm_ = 0.0;
};

struct AlignOptions {
  /// Fraction of frames the best path may misclassify before the alignment
  /// is declared failed.
  double max_mismatch = 0.5;
};

struct AlignResult {
  bool ok = false;
  std::string failure;
  TimingTrack track;      // realized (d, p) per token
  Frames leading_silence = 0;
  double mismatch_rate = 0.0;
};

/// Monotone segmentation of `feat` into [leading silence] then, per token,
/// content frames followed by pause frames, minimizing the number of
/// misclassified frames. Each token gets at least one content frame. Ties
/// go to earlier boundaries.
AlignResult oracle_align(const FeatureSeq& feat, const std::vector<TokenId>& tokens, const World& world,
                         FrameRate rate = {}, const AlignOptions& opts = {});

/// Onset frame of each token's content in a realized alignment.
std::vector<Frames> token_onsets(const AlignResult& r);

struct Utterance {
  std::string id;
  TimingTrack track;  // ground truth
  bool heldout = false;
  /// Exclusive end token index of each word; words group 1-3 tokens.
  std::vector<std::size_t> word_ends;
};

/// Deterministic corpus: the last `n_heldout` utterances are held out.
/// Adjacent tokens never repeat an id.
std::vector<Utterance> gen_corpus(const WorldConfig& world, std::size_t n_utts, std::size_t n_heldout,
                                  std::uint64_t seed, FrameRate rate = {});

/// Flat binary: int64 T, int64 F, then T*F row-major float32.
std::string encode_features(const FeatureSeq& f);
FeatureSeq decode_features(std::string_view bytes);

}  // namespace tempo
