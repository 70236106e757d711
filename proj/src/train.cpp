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

#include "tempo/train.hpp"

#include <cmath>
#include <cstdio>

#include "tempo/track_build.hpp"

namespace tempo {

void TrainConfig::validate() const {
  if (steps < 0) throw DomainError("steps must be non-negative");
  if (batch < 1) throw DomainError("batch must be at least 1");
  if (!(dropout >= 0.0 && dropout <= 1.0)) throw DomainError("dropout must be in [0, 1]");
  if (!(mask_min > 0.0 && mask_min <= mask_max && mask_max <= 1.0))
    throw DomainError("mask fractions must satisfy 0 < min <= max <= 1");
  if (!(optimizer.lr > 0.0)) throw DomainError("learning rate must be positive");
}

std::string train_log_header() {
  return "step\tloss\tabs_alpha_d\tabs_alpha_p\tema_alpha_d\tema_alpha_p\tgrad_norm\n";
}

std::string format_train_row(const TrainLogRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%ld\t%.6f\t%.6g\t%.6g\t%.6g\t%.6g\t%.4f\n", r.step, r.loss, r.gates.abs_content,
                r.gates.abs_pause, r.gates.ema_content, r.gates.ema_pause, r.grad_norm);
  return buf;
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"features", c.features},
          {"width", c.width},
          {"heads", c.heads},
          {"blocks", c.blocks},
          {"ff_mult", c.ff_mult},
          {"time_dim", c.time_dim},
          {"offset_dim", c.offset_dim},
          {"vocab", c.condition.vocab},
          {"embed_dim", c.condition.embed_dim},
          {"hidden_dim", c.condition.hidden_dim},
          {"log_scale_content", c.condition.log_scale_content},
          {"log_scale_pause", c.condition.log_scale_pause}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.features = j.at("features").get<int>();
  c.width = j.at("width").get<int>();
  c.heads = j.at("heads").get<int>();
  c.blocks = j.at("blocks").get<int>();
  c.ff_mult = j.at("ff_mult").get<int>();
  c.time_dim = j.at("time_dim").get<int>();
  c.offset_dim = j.at("offset_dim").get<int>();
  c.condition.vocab = j.at("vocab").get<int>();
  c.condition.embed_dim = j.at("embed_dim").get<int>();
  c.condition.hidden_dim = j.at("hidden_dim").get<int>();
  c.condition.log_scale_content = j.at("log_scale_content").get<double>();
  c.condition.log_scale_pause = j.at("log_scale_pause").get<double>();
  return c;
}

nlohmann::json to_json(const TrainConfig& c) {
  const auto& o = c.optimizer;
  return {{"steps", c.steps},
          {"batch", c.batch},
          {"seed", c.seed},
          {"dropout", c.dropout},
          {"mask_min", c.mask_min},
          {"mask_max", c.mask_max},
          {"telemetry_smoothing", c.telemetry_smoothing},
          {"model", to_json(c.model)},
          {"optimizer",
           {{"kind", o.kind == OptimizerConfig::Kind::adam ? "adam" : "sgd_momentum"},
            {"lr", o.lr},
            {"momentum", o.momentum},
            {"beta1", o.beta1},
            {"beta2", o.beta2},
            {"eps", o.eps},
            {"warmup", o.warmup},
            {"clip_norm", o.clip_norm}}}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.steps = j.at("steps").get<long>();
  c.batch = j.at("batch").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.dropout = j.at("dropout").get<double>();
  c.mask_min = j.at("mask_min").get<double>();
  c.mask_max = j.at("mask_max").get<double>();
  c.telemetry_smoothing = j.at("telemetry_smoothing").get<double>();
  c.model = model_config_from_json(j.at("model"));
  const auto& o = j.at("optimizer");
  const auto kind = o.at("kind").get<std::string>();
  if (kind == "adam") c.optimizer.kind = OptimizerConfig::Kind::adam;
  else if (kind == "sgd_momentum") c.optimizer.kind = OptimizerConfig::Kind::sgd_momentum;
  else throw ParseError("unknown optimizer kind '" + kind + "'");
  c.optimizer.lr = o.at("lr").get<double>();
  c.optimizer.momentum = o.at("momentum").get<double>();
  c.optimizer.beta1 = o.at("beta1").get<double>();
  c.optimizer.beta2 = o.at("beta2").get<double>();
  c.optimizer.eps = o.at("eps").get<double>();
  c.optimizer.warmup = o.at("warmup").get<long>();
  c.optimizer.clip_norm = o.at("clip_norm").get<double>();
  return c;
}

ToyModel load_model(const Checkpoint& ck) {
  ToyModel model(model_config_from_json(ck.meta.at("model")));
  import_params(ck, model.params());
  return model;
}

Trainer::Trainer(const TrainConfig& cfg, std::vector<TrainItem> data)
    : cfg_(cfg), data_(std::move(data)), model_(cfg.model), optimizer_(cfg.optimizer),
      telemetry_(cfg.telemetry_smoothing) {
  cfg_.validate();
  if (data_.empty()) throw DomainError("training set is empty");
  for (const auto& item : data_) {
    if (item.features.rows() != track_total_span(item.track) || item.features.cols() != cfg.model.features)
      throw DomainError("features of '" + item.id + "' do not match its track");
    if (!item.track.fully_available()) throw DomainError("training track '" + item.id + "' is incomplete");
  }
  model_.init(cfg_.seed);
}

Trainer::Trainer(const Checkpoint& ck, std::vector<TrainItem> data, long total_steps)
    : Trainer(train_config_from_json(ck.meta.at("train")), std::move(data)) {
  cfg_.steps = total_steps;
  import_params(ck, model_.params());
  const long done = ck.meta.at("step").get<long>();
  const auto params = model_.params();
  if (done > 0) {
    for (const auto& p : params) {
      optimizer_.first.emplace_back(p.param->value.rows(), p.param->value.cols());
      optimizer_.second.emplace_back(p.param->value.rows(), p.param->value.cols());
      from_tensor(ck.at("opt.m." + p.name), optimizer_.first.back());
      from_tensor(ck.at("opt.v." + p.name), optimizer_.second.back());
    }
    const auto& tel = ck.meta.at("telemetry");
    telemetry_.restore(done, tel.at("ema_alpha_d").get<double>(), tel.at("ema_alpha_p").get<double>());
  }
  optimizer_.step = done;
}

Checkpoint Trainer::checkpoint() {
  Checkpoint ck;
  TrainConfig saved = cfg_;
  ck.meta["format"] = "tempo-flow";
  ck.meta["model"] = to_json(cfg_.model);
  ck.meta["train"] = to_json(saved);
  ck.meta["step"] = optimizer_.step;
  ck.meta["telemetry"] = {{"ema_alpha_d", telemetry_.ema_content()}, {"ema_alpha_p", telemetry_.ema_pause()}};
  const auto params = model_.params();
  export_params(params, ck);
  if (!optimizer_.first.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) ck.tensors.push_back(to_tensor("opt.m." + params[i].name, optimizer_.first[i]));
    for (std::size_t i = 0; i < params.size(); ++i) ck.tensors.push_back(to_tensor("opt.v." + params[i].name, optimizer_.second[i]));
  }
  return ck;
}

FlowSample<float> Trainer::draw(long step, int slot) const {
  Rng rng(stream_key(stream_key(cfg_.seed, "train-sample"), static_cast<std::uint64_t>(step) * 4096u + static_cast<std::uint64_t>(slot)));
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const TrainItem& item = data_[pick(rng)];
  const double frac = cfg_.mask_min + (cfg_.mask_max - cfg_.mask_min) * unit(rng);
  const Eigen::Index T = item.features.rows();
  const auto generated = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(frac * double(T))));

  FlowSample<float> s;
  s.tokens = item.track.tokens;
  s.track = apply_dropout(item.track, DropoutPolicy{cfg_.dropout, cfg_.seed}, item.id + "#" + std::to_string(step));
  s.x1 = item.features.cast<float>();
  s.x0 = standard_normal<float>(T, item.features.cols(), rng);
  s.t = static_cast<float>(unit(rng));
  s.context_frames = T - std::min(T, generated);
  return s;
}

TrainLogRow Trainer::step() {
  const long at = optimizer_.step;
  model_.zero_grad();
  double loss = 0.0;
  const float scale = 1.0f / float(cfg_.batch);
  for (int b = 0; b < cfg_.batch; ++b) loss += flow_sample_loss(model_, draw(at, b), scale);
  loss /= cfg_.batch;
  TrainLogRow row;
  row.loss = loss;
  row.grad_norm = optimizer_.apply(model_.params());
  row.step = optimizer_.step;
  row.gates = telemetry_.update(row.step, model_.condition.alpha_content(), model_.condition.alpha_pause());
  return row;
}

}  // namespace tempo
