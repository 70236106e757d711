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

// End-to-end steps shared by the command-line tool and the acceptance
// suite. Every function here reads its inputs and writes new outputs; none
// modifies an input file.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tempo/crossval.hpp"
#include "tempo/edit.hpp"
#include "tempo/eval.hpp"
#include "tempo/train.hpp"
#include "tempo/world.hpp"

namespace tempo {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Cross-validation over a manifest of alignment pairs

struct CrossvalOptions {
  FilterConfig filter;
  FrameRate rate;
  std::string textgrid_tier = "words";
};

struct CrossvalRecord {
  std::string utterance_id;
  std::optional<FilterVerdict> verdict;  // empty when the pair is not comparable
  std::string note;
  std::optional<UtterancePair> pair;
  std::optional<AlignmentSeq> source_b;
};

struct CrossvalReport {
  std::vector<CrossvalRecord> records;
  CorpusStats stats;
};

/// Manifest lines: `utterance_id\ttranscript\tpath_a\tpath_b`, paths
/// relative to the manifest. Files ending in `.TextGrid` are read as
/// TextGrids, anything else as word records; `-` marks a missing source.
/// Blank lines and lines starting with '#' are skipped.
CrossvalReport run_crossval(const fs::path& manifest, const CrossvalOptions& opts);

/// Verdict records followed by the stats block.
std::string format_crossval_report(const CrossvalReport& report, const FilterConfig& cfg);

/// One track per passed utterance (source B timing, one token per
/// normalized character) plus `tracks.tsv` listing them. Returns the count.
std::size_t build_tracks(const CrossvalReport& report, const fs::path& out_dir, FrameRate rate,
                         const BuildOptions& opts = {});

// ---------------------------------------------------------------------------
// Synthetic corpus on disk

struct CorpusSpec {
  WorldConfig world;
  std::size_t n_train = 200, n_test = 50;
  std::uint64_t seed = 1;
  FrameRate rate;
};

struct Corpus {
  CorpusSpec spec;
  std::vector<Utterance> utterances;
  std::vector<FeatureSeq> features;  // rendered with the world's noise

  std::vector<std::size_t> split(bool heldout) const;
};

/// Deterministic in `spec` alone.
Corpus make_corpus(const CorpusSpec& spec);
/// Writes world.json, manifest.tsv and one .track/.feat pair per utterance.
void write_corpus(const Corpus& corpus, const fs::path& dir);
Corpus read_corpus(const fs::path& dir);

std::vector<TrainItem> training_items(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Training run

struct TrainRunOptions {
  TrainConfig config;
  fs::path checkpoint;
  fs::path log;
  bool resume = false;
  long save_every = 1000;
  std::ostream* progress = nullptr;
  long progress_every = 100;
};

struct TrainRunSummary {
  long first_step = 0, last_step = 0;
  double final_loss = 0.0;
};

/// Trains on the non-held-out utterances, appending one log row per step.
/// With `resume` and an existing checkpoint, continues from it and drops
/// log rows past the checkpoint. A non-finite loss throws NumericError
/// after the rows so far have been flushed.
TrainRunSummary run_train(const Corpus& corpus, const TrainRunOptions& opts);

// ---------------------------------------------------------------------------
// Synthesis and evaluation

enum class SynthMode { controlled, spontaneous };
enum class CondFormat { full, target_only };
const char* to_string(SynthMode m);
const char* to_string(CondFormat f);
SynthMode parse_synth_mode(std::string_view s);
CondFormat parse_cond_format(std::string_view s);

/// Generates features for `tokens` and aligns them with the oracle.
/// Controlled mode takes the length from `track`; otherwise `total` frames.
AlignResult realize(const ToyModel& model, const World& world, const std::vector<TokenId>& tokens,
                    const TimingTrack* track, const FeatureSeq& context, std::optional<Frames> total,
                    int sampler_steps, std::uint64_t seed);

struct EvalOptions {
  SynthMode mode = SynthMode::controlled;
  CondFormat format = CondFormat::full;
  std::vector<double> thresholds_ms{50.0, 100.0};
  /// Leading tokens whose ground-truth audio is given as context; they are
  /// never scored.
  double prompt_fraction = 0.3;
  int sampler_steps = 16;
  std::uint64_t seed = 0;
};

struct EvalReport {
  EvalOptions options;
  std::vector<TimingComparison> comparisons;  // one per held-out utterance
};

std::size_t prompt_tokens(std::size_t n_tokens, double prompt_fraction);

EvalReport run_eval(const ToyModel& model, const Corpus& corpus, const EvalOptions& opts);

/// Human-readable table, one row per report.
std::string format_eval_table(const std::vector<EvalReport>& reports);
/// Line records: a config header, per-utterance status, then metrics.
std::string format_eval_records(const EvalReport& report, FrameRate rate);

// ---------------------------------------------------------------------------
// Edit benchmarks

struct EditBenchOptions {
  bool strict = true;
  double strict_tolerance_ms = 0.0;
  int sampler_steps = 16;
  std::uint64_t seed = 0;
  ScenarioOptions scenario;
  StressConfig stress;
};

struct EditRow {
  EditCase edit;
  bool retained = true;
  std::string scenario;  // scenario name or stress condition label
};

/// Realizes baseline and edited tracks with the same sampling seed and
/// applies the strict filter (when enabled) to the edited realization.
EditRow realize_edit(const ToyModel& model, const World& world, EditCase c, const EditBenchOptions& opts,
                     std::uint64_t seed);

/// Scenario demos: one content row and one pause row per demo.
std::vector<EditRow> run_scenario_bench(const ToyModel& model, const World& world, const EditBenchOptions& opts);
std::vector<EditRow> run_stress_bench(const ToyModel& model, const Corpus& corpus, const EditBenchOptions& opts);

std::string format_scenario_report(const std::vector<EditRow>& rows, const EditBenchOptions& opts);
std::string format_stress_report(const std::vector<EditRow>& rows, const EditBenchOptions& opts);

}  // namespace tempo
