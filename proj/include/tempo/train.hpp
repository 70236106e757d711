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

#include <string>
#include <vector>

#include <json.hpp>

#include "tempo/checkpoint.hpp"
#include "tempo/condition.hpp"
#include "tempo/flow.hpp"
#include "tempo/world.hpp"

namespace tempo {

/// One training utterance: ground-truth track and rendered features.
struct TrainItem {
  std::string id;
  TimingTrack track;
  FeatureSeq features;
};

struct TrainConfig {
  long steps = 8000;
  int batch = 8;
  std::uint64_t seed = 0;
  double dropout = 0.2;
  /// The generated (loss-bearing) suffix covers a uniform fraction of the
  /// utterance in [mask_min, mask_max]; the rest is acoustic context.
  double mask_min = 0.4, mask_max = 1.0;
  double telemetry_smoothing = 0.6;
  ModelConfig model;
  OptimizerConfig optimizer;

  void validate() const;
};

struct TrainLogRow {
  long step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  GateTelemetry::Row gates{};
};

/// `step\tloss\tabs_alpha_d\tabs_alpha_p\tema_alpha_d\tema_alpha_p\tgrad_norm`
std::string train_log_header();
std::string format_train_row(const TrainLogRow& row);

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// The single-precision model trained and sampled by the pipeline.
using ToyModel = FlowModel<float>;

ToyModel load_model(const Checkpoint& ck);

/// Owns the model, optimizer and telemetry state of one training run.
class Trainer {
 public:
  Trainer(const TrainConfig& cfg, std::vector<TrainItem> data);
  /// Continues a run saved with checkpoint(); `cfg.steps` may differ.
  Trainer(const Checkpoint& ck, std::vector<TrainItem> data, long total_steps);

  TrainLogRow step();
  long steps_done() const { return optimizer_.step; }
  bool finished() const { return steps_done() >= cfg_.steps; }

  const TrainConfig& config() const { return cfg_; }
  ToyModel& model() { return model_; }
  Checkpoint checkpoint();

  /// The training instance for batch slot `slot` of step `step`; a pure
  /// function of the seed, so runs are reproducible and resumable.
  FlowSample<float> draw(long step, int slot) const;

 private:
  TrainConfig cfg_;
  std::vector<TrainItem> data_;
  ToyModel model_;
  Optimizer<float> optimizer_;
  GateTelemetry telemetry_;
};

}  // namespace tempo
