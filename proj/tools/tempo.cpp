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

// tempo: command-line front end for the timing-control pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "tempo/io.hpp"
#include "tempo/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tempo;

namespace {

constexpr int kUsage = 1, kData = 2, kNumeric = 3;

struct Globals {
  fs::path data_root = ".";
  double fps = FrameRate::kDefaultFps;

  fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : data_root / p; }
};

void emit(const std::string& text, const std::string& out_path, const Globals& g) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    const fs::path p = g.resolve(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_file(p.string(), text);
  }
}

std::vector<double> parse_thresholds(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    const double v = parse_real(trim(std::string_view(s).substr(pos, comma - pos)));
    if (!(v >= 0.0)) throw DomainError("thresholds must be non-negative");
    out.push_back(v);
    pos = comma + 1;
  }
  if (out.empty()) throw DomainError("at least one threshold is required");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Token-level timing control: alignment filtering, track building, toy training and evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags take precedence");
  Globals g;
  app.add_option("--data-root", g.data_root, "Base directory for relative paths")->envname("TEMPO_DATA_ROOT");
  app.add_option("--fps", g.fps, "Acoustic frame rate")->capture_default_str();

  // crossval / build-tracks ------------------------------------------------
  std::string manifest, out, tier = "words", tracks_dir;
  double delta_ms = 150.0;
  bool no_final_silence = false;
  auto* xv = app.add_subcommand("crossval", "Filter alignment pairs by coverage, order and boundary agreement");
  xv->add_option("--manifest", manifest, "Pair manifest (utterance_id, transcript, path_a, path_b)")->required();
  xv->add_option("--delta-ms", delta_ms, "Boundary tolerance in ms")->capture_default_str();
  xv->add_option("--tier", tier, "TextGrid interval tier")->capture_default_str();
  xv->add_option("--out", out, "Verdict file (default stdout)");

  auto* bt = app.add_subcommand("build-tracks", "Write timing tracks for the pairs that pass the filter");
  bt->add_option("--manifest", manifest, "Pair manifest")->required();
  bt->add_option("--out-dir", tracks_dir, "Output directory")->required();
  bt->add_option("--delta-ms", delta_ms, "Boundary tolerance in ms")->capture_default_str();
  bt->add_option("--tier", tier, "TextGrid interval tier")->capture_default_str();
  bt->add_flag("--no-final-silence", no_final_silence, "Do not give trailing silence to the last token");

  // gen-corpus -------------------------------------------------------------
  CorpusSpec spec;
  std::string corpus_dir = "corpus";
  auto* gc = app.add_subcommand("gen-corpus", "Generate a synthetic corpus");
  gc->add_option("--out-dir", corpus_dir, "Corpus directory")->capture_default_str();
  gc->add_option("--n-train", spec.n_train, "Training utterances")->capture_default_str();
  gc->add_option("--n-test", spec.n_test, "Held-out utterances")->capture_default_str();
  gc->add_option("--seed", spec.seed, "Corpus seed")->capture_default_str();
  gc->add_option("--noise", spec.world.noise_std, "Observation noise std")->capture_default_str();
  gc->add_option("--vocab", spec.world.vocab, "Token vocabulary size")->capture_default_str();

  // train ------------------------------------------------------------------
  TrainConfig tc;
  std::string checkpoint = "model.ckpt", log = "train.log", optimizer = "adam";
  bool resume = false;
  long save_every = 1000;
  auto* tr = app.add_subcommand("train", "Train the toy flow-matching model");
  tr->add_option("--corpus", corpus_dir, "Corpus directory")->capture_default_str();
  tr->add_option("--checkpoint", checkpoint, "Checkpoint to write")->capture_default_str();
  tr->add_option("--log", log, "Per-step training log")->capture_default_str();
  tr->add_option("--steps", tc.steps, "Optimizer steps")->capture_default_str();
  tr->add_option("--batch", tc.batch, "Utterances per step")->capture_default_str();
  tr->add_option("--seed", tc.seed, "Initialization and batching seed")->capture_default_str();
  tr->add_option("--dropout", tc.dropout, "Whole-track timing dropout probability")->capture_default_str();
  tr->add_option("--lr", tc.optimizer.lr, "Peak learning rate")->capture_default_str();
  tr->add_option("--warmup", tc.optimizer.warmup, "Linear warmup steps")->capture_default_str();
  tr->add_option("--optimizer", optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}))->capture_default_str();
  tr->add_option("--width", tc.model.width, "Transformer width")->capture_default_str();
  tr->add_option("--blocks", tc.model.blocks, "Transformer blocks")->capture_default_str();
  tr->add_option("--save-every", save_every, "Checkpoint interval in steps; 0 saves only at the end")->capture_default_str();
  tr->add_flag("--resume", resume, "Continue from an existing checkpoint");

  // eval -------------------------------------------------------------------
  EvalOptions eo;
  std::string mode = "all", cond_format = "full", thresholds = "50,100", records;
  auto* ev = app.add_subcommand("eval", "Synthesize the held-out set and score timing control");
  ev->add_option("--corpus", corpus_dir, "Corpus directory")->capture_default_str();
  ev->add_option("--checkpoint", checkpoint, "Model checkpoint")->capture_default_str();
  ev->add_option("--mode", mode, "controlled, spontaneous or all")
      ->check(CLI::IsMember({"controlled", "spontaneous", "all"}))
      ->capture_default_str();
  ev->add_option("--cond-format", cond_format, "full, target_only or all")
      ->check(CLI::IsMember({"full", "target_only", "all"}))
      ->capture_default_str();
  ev->add_option("--thresholds", thresholds, "Pause F1 thresholds in ms, comma separated")->capture_default_str();
  ev->add_option("--seed", eo.seed, "Sampling noise seed")->capture_default_str();
  ev->add_option("--sampler-steps", eo.sampler_steps)->capture_default_str();
  ev->add_option("--prompt-fraction", eo.prompt_fraction)->capture_default_str();
  ev->add_option("--records", records, "Machine-readable output file (default: after the table on stdout)");

  // edit-bench -------------------------------------------------------------
  EditBenchOptions bo;
  std::string suite = "scenario";
  auto* eb = app.add_subcommand("edit-bench", "Local timing-edit benchmarks");
  eb->add_option("--suite", suite, "scenario or stress")->check(CLI::IsMember({"scenario", "stress"}))->capture_default_str();
  eb->add_option("--checkpoint", checkpoint, "Model checkpoint")->capture_default_str();
  eb->add_option("--corpus", corpus_dir, "Corpus directory (world and held-out set)")->capture_default_str();
  eb->add_flag("--strict,!--no-strict", bo.strict, "Drop rows whose edit boundary falls inside word content")
      ->capture_default_str();
  eb->add_option("--tolerance-ms", bo.strict_tolerance_ms, "Word-edge tolerance of the strict rule")->capture_default_str();
  eb->add_option("--seed", bo.seed, "Sampling noise seed")->capture_default_str();
  eb->add_option("--sampler-steps", bo.sampler_steps)->capture_default_str();
  eb->add_option("--span", bo.scenario.content_span, "Tokens per scenario content edit")->capture_default_str();
  eb->add_option("--out", out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    const FrameRate rate(g.fps);
    if (*xv || *bt) {
      CrossvalOptions co;
      co.filter.delta_ms = delta_ms;
      co.rate = rate;
      co.textgrid_tier = tier;
      const auto report = run_crossval(g.resolve(manifest), co);
      if (*xv) {
        emit(format_crossval_report(report, co.filter), out, g);
      } else {
        BuildOptions b;
        b.assign_final_silence = !no_final_silence;
        const auto n = build_tracks(report, g.resolve(tracks_dir), rate, b);
        std::cout << "# tracks_written=" << n << "\n";
      }
    } else if (*gc) {
      spec.rate = rate;
      spec.world.validate();
      if (spec.n_train + spec.n_test == 0) throw DomainError("corpus must contain at least one utterance");
      write_corpus(make_corpus(spec), g.resolve(corpus_dir));
    } else if (*tr) {
      tc.optimizer.kind = optimizer == "sgd" ? OptimizerConfig::Kind::sgd_momentum : OptimizerConfig::Kind::adam;
      tc.model.condition.embed_dim = tc.model.width;
      tc.validate();
      const Corpus corpus = read_corpus(g.resolve(corpus_dir));
      tc.model.features = corpus.spec.world.features;
      tc.model.condition.vocab = corpus.spec.world.vocab;
      TrainRunOptions ro;
      ro.config = tc;
      ro.checkpoint = g.resolve(checkpoint);
      ro.log = g.resolve(log);
      ro.resume = resume;
      ro.save_every = save_every;
      ro.progress = &std::cerr;
      std::cout << "# resolved " << to_json(tc).dump() << "\n";
      const auto s = run_train(corpus, ro);
      std::cout << "# steps " << s.first_step << ".." << s.last_step << " final_loss=" << format_real(s.final_loss) << "\n";
    } else if (*ev) {
      const Corpus corpus = read_corpus(g.resolve(corpus_dir));
      const ToyModel model = load_model(read_checkpoint(g.resolve(checkpoint)));
      eo.thresholds_ms = parse_thresholds(thresholds);
      std::vector<EvalReport> reports;
      std::vector<std::pair<SynthMode, CondFormat>> runs;
      if (mode != "spontaneous") {
        if (cond_format != "target_only") runs.emplace_back(SynthMode::controlled, CondFormat::full);
        if (cond_format != "full") runs.emplace_back(SynthMode::controlled, CondFormat::target_only);
      }
      if (mode != "controlled") runs.emplace_back(SynthMode::spontaneous, CondFormat::full);
      std::string machine;
      for (const auto& [m, f] : runs) {
        EvalOptions o = eo;
        o.mode = m;
        o.format = f;
        reports.push_back(run_eval(model, corpus, o));
        machine += format_eval_records(reports.back(), corpus.spec.rate);
      }
      std::cout << format_eval_table(reports);
      if (records.empty()) std::cout << "\n" << machine;
      else emit(machine, records, g);
    } else if (*eb) {
      const ToyModel model = load_model(read_checkpoint(g.resolve(checkpoint)));
      bo.scenario.rate = rate;
      if (suite == "scenario") {
        WorldConfig wc;
        const fs::path cdir = g.resolve(corpus_dir);
        if (fs::exists(cdir / "world.json")) wc = read_corpus(cdir).spec.world;
        const World world(wc);
        emit(format_scenario_report(run_scenario_bench(model, world, bo), bo), out, g);
      } else {
        const Corpus corpus = read_corpus(g.resolve(corpus_dir));
        emit(format_stress_report(run_stress_bench(model, corpus, bo), bo), out, g);
      }
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return 0;
}
