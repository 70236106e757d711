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

#include "tempo/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tempo/io.hpp"
#include "tempo/text.hpp"
#include "tempo/track_build.hpp"

namespace tempo {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
  return out;
}

[[noreturn]] void rethrow_with_file(const fs::path& path, const ParseError& e) {
  throw ParseError(path.filename().string() + ": " + e.what());
}

AlignmentSeq load_source(const fs::path& path, const CrossvalOptions& opts, SourceTag tag) {
  const std::string text = read_file(path.string());
  try {
    if (path.extension() == ".TextGrid") return parse_textgrid(text, opts.textgrid_tier, {}, tag);
    return parse_word_alignment(text, opts.rate, tag);
  } catch (const ParseError& e) {
    rethrow_with_file(path, e);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Cross-validation

CrossvalReport run_crossval(const fs::path& manifest, const CrossvalOptions& opts) {
  if (!(opts.filter.delta_ms > 0.0)) throw DomainError("delta_ms must be positive");
  const std::string text = read_file(manifest.string());
  const fs::path base = manifest.parent_path();
  CrossvalReport report;
  int lineno = 0;
  for (auto line : split_lines(text)) {
    ++lineno;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 4) throw ParseError(manifest.filename().string() + ": line " + std::to_string(lineno) +
                                        ": expected utterance_id, transcript, path_a, path_b");
    CrossvalRecord rec;
    rec.utterance_id = std::string(f[0]);
    std::optional<AlignmentSeq> a, b;
    if (f[2] != "-") a = load_source(base / std::string(f[2]), opts, SourceTag::A);
    if (f[3] != "-") b = load_source(base / std::string(f[3]), opts, SourceTag::B);
    std::string transcript(f[1]);
    if (transcript.empty() && a && a->transcript) transcript = *a->transcript;
    if (!a || !b) {
      rec.note = "missing source";
    } else {
      UtterancePair pair;
      pair.utterance_id = rec.utterance_id;
      pair.normalized_text = normalize_text(transcript).text;
      try {
        pair.spans_a = project_to_axis(*a, pair.normalized_text);
        pair.spans_b = project_to_axis(*b, pair.normalized_text);
        rec.verdict = filter_utterance(pair, opts.filter);
        rec.pair = std::move(pair);
        rec.source_b = std::move(b);
      } catch (const ProjectionError& e) {
        rec.note = e.what();
      }
    }
    report.stats.add(rec.verdict);
    report.records.push_back(std::move(rec));
  }
  return report;
}

std::string format_crossval_report(const CrossvalReport& report, const FilterConfig& cfg) {
  std::string out;
  for (const auto& r : report.records) out += format_verdict(r.utterance_id, r.verdict);
  out += format_stats(report.stats, cfg);
  return out;
}

std::size_t build_tracks(const CrossvalReport& report, const fs::path& out_dir, FrameRate rate,
                         const BuildOptions& opts) {
  fs::create_directories(out_dir);
  std::string index = "#utterance_id\ttrack\n";
  std::size_t n = 0;
  for (const auto& r : report.records) {
    if (!r.verdict || !r.verdict->passed) continue;
    BuildOptions o = opts;
    if (!o.end_of_audio_s) o.end_of_audio_s = r.source_b->end_of_audio_s;
    const auto track = build_track(r.pair->spans_b, char_tokenization(r.pair->normalized_text), rate, o);
    const std::string name = r.utterance_id + ".track";
    write_track_file((out_dir / name).string(), track);
    index += r.utterance_id + "\t" + name + "\n";
    ++n;
  }
  write_file((out_dir / "tracks.tsv").string(), index);
  return n;
}

// ---------------------------------------------------------------------------
// Corpus

std::vector<std::size_t> Corpus::split(bool heldout) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < utterances.size(); ++i)
    if (utterances[i].heldout == heldout) out.push_back(i);
  return out;
}

Corpus make_corpus(const CorpusSpec& spec) {
  Corpus c;
  c.spec = spec;
  c.utterances = gen_corpus(spec.world, spec.n_train + spec.n_test, spec.n_test, spec.seed, spec.rate);
  const World world(spec.world);
  for (const auto& u : c.utterances) c.features.push_back(world.render(u.track, stream_key(spec.seed, "render:" + u.id)));
  return c;
}

namespace {

nlohmann::json spec_json(const CorpusSpec& s) {
  const auto& w = s.world;
  return {{"vocab", w.vocab},
          {"features", w.features},
          {"content_min", w.content_min},
          {"content_max", w.content_max},
          {"pause_prob", w.pause_prob},
          {"pause_min", w.pause_min},
          {"pause_max", w.pause_max},
          {"tokens_min", w.tokens_min},
          {"tokens_max", w.tokens_max},
          {"noise_std", w.noise_std},
          {"silence_threshold", w.silence_threshold},
          {"max_signature_cosine", w.max_signature_cosine},
          {"signature_seed", w.signature_seed},
          {"n_train", s.n_train},
          {"n_test", s.n_test},
          {"seed", s.seed},
          {"fps", s.rate.fps()}};
}

CorpusSpec spec_from_json(const nlohmann::json& j) {
  CorpusSpec s;
  auto& w = s.world;
  w.vocab = j.at("vocab").get<int>();
  w.features = j.at("features").get<int>();
  w.content_min = j.at("content_min").get<Frames>();
  w.content_max = j.at("content_max").get<Frames>();
  w.pause_prob = j.at("pause_prob").get<double>();
  w.pause_min = j.at("pause_min").get<Frames>();
  w.pause_max = j.at("pause_max").get<Frames>();
  w.tokens_min = j.at("tokens_min").get<int>();
  w.tokens_max = j.at("tokens_max").get<int>();
  w.noise_std = j.at("noise_std").get<double>();
  w.silence_threshold = j.at("silence_threshold").get<double>();
  w.max_signature_cosine = j.at("max_signature_cosine").get<double>();
  w.signature_seed = j.at("signature_seed").get<std::uint64_t>();
  s.n_train = j.at("n_train").get<std::size_t>();
  s.n_test = j.at("n_test").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.rate = FrameRate(j.at("fps").get<double>());
  return s;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::vector<std::size_t> parse_sizes(std::string_view s, int line) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    const auto item = s.substr(pos, comma - pos);
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size() || item.empty()) throw ParseError("bad word_ends list", line);
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  write_file((dir / "world.json").string(), spec_json(corpus.spec).dump(2) + "\n");
  std::string manifest = "#utterance_id\tsplit\tword_ends\n";
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    const auto& u = corpus.utterances[i];
    manifest += u.id + "\t" + (u.heldout ? "test" : "train") + "\t" + join_sizes(u.word_ends) + "\n";
    write_track_file((dir / (u.id + ".track")).string(), u.track);
    write_file((dir / (u.id + ".feat")).string(), encode_features(corpus.features[i]));
  }
  write_file((dir / "manifest.tsv").string(), manifest);
}

Corpus read_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DomainError("corpus directory '" + dir.string() + "' does not exist");
  Corpus c;
  try {
    c.spec = spec_from_json(nlohmann::json::parse(read_file((dir / "world.json").string())));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("world.json: ") + e.what());
  }
  const std::string manifest = read_file((dir / "manifest.tsv").string());
  int lineno = 0;
  for (auto line : split_lines(manifest)) {
    ++lineno;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 3 || (f[1] != "train" && f[1] != "test"))
      throw ParseError("manifest.tsv: line " + std::to_string(lineno) + ": expected utterance_id, train|test, word_ends");
    Utterance u;
    u.id = std::string(f[0]);
    u.heldout = f[1] == "test";
    u.word_ends = parse_sizes(f[2], lineno);
    u.track = read_track_file((dir / (u.id + ".track")).string());
    FeatureSeq feat = decode_features(read_file((dir / (u.id + ".feat")).string()));
    if (feat.rows() != track_total_span(u.track) || feat.cols() != c.spec.world.features)
      throw ParseError(u.id + ".feat: shape does not match the track");
    c.utterances.push_back(std::move(u));
    c.features.push_back(std::move(feat));
  }
  return c;
}

std::vector<TrainItem> training_items(const Corpus& corpus) {
  std::vector<TrainItem> items;
  for (std::size_t i : corpus.split(false))
    items.push_back({corpus.utterances[i].id, corpus.utterances[i].track, corpus.features[i]});
  return items;
}

// ---------------------------------------------------------------------------
// Training

namespace {

// Keeps the header and the rows at or before `step`.
void truncate_log(const fs::path& log, long step) {
  if (!fs::exists(log)) return;
  const std::string text = read_file(log.string());
  std::string kept;
  for (auto line : split_lines(text)) {
    if (line.empty()) continue;
    if (line.front() != 's') {
      long s = 0;
      std::from_chars(line.data(), line.data() + line.size(), s);
      if (s > step) break;
    }
    kept += std::string(line) + "\n";
  }
  write_file(log.string(), kept);
}

}  // namespace

TrainRunSummary run_train(const Corpus& corpus, const TrainRunOptions& opts) {
  auto items = training_items(corpus);
  std::optional<Trainer> trainer;
  const bool resuming = opts.resume && fs::exists(opts.checkpoint);
  if (resuming) {
    trainer.emplace(read_checkpoint(opts.checkpoint), std::move(items), opts.config.steps);
    truncate_log(opts.log, trainer->steps_done());
  } else {
    trainer.emplace(opts.config, std::move(items));
    write_file(opts.log.string(), train_log_header());
  }
  std::ofstream log(opts.log, std::ios::app | std::ios::binary);
  if (!log) throw DomainError("cannot open training log '" + opts.log.string() + "'");
  TrainRunSummary summary;
  summary.first_step = summary.last_step = trainer->steps_done();
  while (!trainer->finished()) {
    TrainLogRow row;
    try {
      row = trainer->step();
    } catch (const NumericError&) {
      log.flush();
      throw;
    }
    log << format_train_row(row);
    log.flush();
    summary.last_step = row.step;
    summary.final_loss = row.loss;
    if (opts.progress && opts.progress_every > 0 && row.step % opts.progress_every == 0)
      *opts.progress << format_train_row(row) << std::flush;
    if (opts.save_every > 0 && row.step % opts.save_every == 0) write_checkpoint(opts.checkpoint, trainer->checkpoint());
  }
  write_checkpoint(opts.checkpoint, trainer->checkpoint());
  return summary;
}

// ---------------------------------------------------------------------------
// Evaluation

const char* to_string(SynthMode m) { return m == SynthMode::controlled ? "controlled" : "spontaneous"; }
const char* to_string(CondFormat f) { return f == CondFormat::full ? "full" : "target_only"; }

SynthMode parse_synth_mode(std::string_view s) {
  if (s == "controlled") return SynthMode::controlled;
  if (s == "spontaneous") return SynthMode::spontaneous;
  throw DomainError("unknown mode '" + std::string(s) + "'");
}

CondFormat parse_cond_format(std::string_view s) {
  if (s == "full") return CondFormat::full;
  if (s == "target_only") return CondFormat::target_only;
  throw DomainError("unknown conditioning format '" + std::string(s) + "'");
}

AlignResult realize(const ToyModel& model, const World& world, const std::vector<TokenId>& tokens,
                    const TimingTrack* track, const FeatureSeq& context, std::optional<Frames> total,
                    int sampler_steps, std::uint64_t seed) {
  const Mat<float> ctx = context.cast<float>();
  const Mat<float> out = sample(model, tokens, track, ctx, total, sampler_steps, seed);
  const FrameRate rate = track ? track->rate : FrameRate{};
  return oracle_align(out.cast<double>(), tokens, world, rate);
}

std::size_t prompt_tokens(std::size_t n_tokens, double prompt_fraction) {
  if (!(prompt_fraction >= 0.0 && prompt_fraction < 1.0)) throw DomainError("prompt fraction must be in [0, 1)");
  return std::min(n_tokens > 0 ? n_tokens - 1 : 0, static_cast<std::size_t>(std::floor(prompt_fraction * double(n_tokens))));
}

EvalReport run_eval(const ToyModel& model, const Corpus& corpus, const EvalOptions& opts) {
  if (opts.sampler_steps < 1) throw DomainError("sampler steps must be >= 1");
  const auto test = corpus.split(true);
  if (test.empty()) throw DomainError("corpus has no held-out utterances");
  const World world(corpus.spec.world);
  EvalReport report;
  report.options = opts;
  for (std::size_t idx : test) {
    const Utterance& u = corpus.utterances[idx];
    const std::size_t P = prompt_tokens(u.track.size(), opts.prompt_fraction);
    Frames context_frames = 0;
    for (std::size_t i = 0; i < P; ++i) context_frames += u.track.timings[i].content + u.track.timings[i].pause;
    const FeatureSeq context = corpus.features[idx].topRows(context_frames);
    const Frames total = track_total_span(u.track);
    const std::uint64_t seed = stream_key(opts.seed, "eval:" + u.id);
    AlignResult r;
    if (opts.mode == SynthMode::spontaneous) {
      r = realize(model, world, u.track.tokens, nullptr, context, total, opts.sampler_steps, seed);
    } else {
      const TimingTrack cond = opts.format == CondFormat::full ? u.track : mask_prompt_region(u.track, P);
      r = realize(model, world, u.track.tokens, &cond, context, total, opts.sampler_steps, seed);
    }
    report.comparisons.push_back(compare_tracks(u.id, u.track, r, P, u.track.size()));
  }
  return report;
}

namespace {

struct EvalMetrics {
  std::optional<double> c_mae, p_mae;
  Correlation c_corr, p_corr;
  std::vector<F1Result> f1;
  std::size_t scored = 0, failed = 0, tokens = 0;
};

EvalMetrics metrics_of(const EvalReport& r) {
  EvalMetrics m;
  m.scored = scored_utterances(r.comparisons);
  m.failed = failed_utterances(r.comparisons);
  for (const auto& c : r.comparisons)
    if (c.alignment_ok) m.tokens += c.tokens.size();
  if (m.tokens > 0) {
    m.c_mae = content_mae(r.comparisons);
    m.p_mae = pause_mae(r.comparisons);
  }
  m.c_corr = content_corr(r.comparisons);
  m.p_corr = pause_corr(r.comparisons);
  for (double t : r.options.thresholds_ms) m.f1.push_back(pause_f1(r.comparisons, t));
  return m;
}

std::string opt_real(const std::optional<double>& v, const char* f) { return v ? fmt(f, *v) : "n/a"; }
std::string corr_str(const Correlation& c, const char* f) { return c.defined ? fmt(f, c.value) : "undef"; }

std::string format_label(const EvalOptions& o) {
  return o.mode == SynthMode::spontaneous ? "-" : to_string(o.format);
}

}  // namespace

std::string format_eval_table(const std::vector<EvalReport>& reports) {
  if (reports.empty()) return "";
  std::ostringstream os;
  const auto& th = reports.front().options.thresholds_ms;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %-12s %8s %8s %7s %7s", "Mode", "Format", "C-MAE", "P-MAE", "C-Corr", "P-Corr");
  os << buf;
  for (double t : th) {
    std::snprintf(buf, sizeof(buf), " %7s", ("F1@" + format_real(t)).c_str());
    os << buf;
  }
  os << "  Aligned\n";
  for (const auto& r : reports) {
    const auto m = metrics_of(r);
    std::snprintf(buf, sizeof(buf), "%-12s %-12s %8s %8s %7s %7s", to_string(r.options.mode), format_label(r.options).c_str(),
                  opt_real(m.c_mae, "%.2f").c_str(), opt_real(m.p_mae, "%.2f").c_str(), corr_str(m.c_corr, "%.3f").c_str(),
                  corr_str(m.p_corr, "%.3f").c_str());
    os << buf;
    for (const auto& f : m.f1) os << " " << (m.tokens > 0 ? fmt("%7.3f", f.f1) : "    n/a");
    os << "  " << m.scored << "/" << r.comparisons.size() << "\n";
  }
  return os.str();
}

std::string format_eval_records(const EvalReport& r, FrameRate rate) {
  const auto& o = r.options;
  const auto m = metrics_of(r);
  std::ostringstream os;
  os << "# mode=" << to_string(o.mode) << " format=" << format_label(o) << " pooling=tokens thresholds_ms="
     << join_reals(o.thresholds_ms) << " prompt_fraction=" << format_real(o.prompt_fraction)
     << " sampler_steps=" << o.sampler_steps << " seed=" << o.seed << " fps=" << format_real(rate.fps()) << "\n";
  for (const auto& c : r.comparisons)
    os << "utt\t" << c.utterance_id << "\t" << (c.alignment_ok ? "ok" : "align_fail") << "\t" << c.tokens.size() << "\n";
  const std::string tag = std::string(to_string(o.mode)) + "\t" + format_label(o) + "\t";
  os << "metric\t" << tag << "c_mae_ms\t" << opt_real(m.c_mae, "%.6f") << "\n";
  os << "metric\t" << tag << "p_mae_ms\t" << opt_real(m.p_mae, "%.6f") << "\n";
  os << "metric\t" << tag << "c_corr\t" << corr_str(m.c_corr, "%.6f") << "\n";
  os << "metric\t" << tag << "p_corr\t" << corr_str(m.p_corr, "%.6f") << "\n";
  for (std::size_t k = 0; k < m.f1.size(); ++k)
    os << "metric\t" << tag << "f1@" << format_real(o.thresholds_ms[k]) << "\t"
       << (m.tokens > 0 ? fmt("%.6f", m.f1[k].f1) + (m.f1[k].degenerate ? "\tdegenerate" : "") : "n/a") << "\n";
  os << "metric\t" << tag << "scored_tokens\t" << m.tokens << "\n";
  os << "metric\t" << tag << "aligned\t" << m.scored << "\n";
  os << "metric\t" << tag << "align_failures\t" << m.failed << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Edit benchmarks

EditRow realize_edit(const ToyModel& model, const World& world, EditCase c, const EditBenchOptions& opts,
                     std::uint64_t seed) {
  const FeatureSeq none(0, world.config().features);
  c.realized_baseline = realize(model, world, c.baseline.tokens, &c.baseline, none, {}, opts.sampler_steps, seed);
  c.realized_edited = realize(model, world, c.edited.tokens, &c.edited, none, {}, opts.sampler_steps, seed);
  EditRow row;
  row.retained = c.realized_baseline.ok && c.realized_edited.ok;
  if (row.retained && opts.strict)
    row.retained = strict_filter(c, word_intervals_ms(c.realized_edited, c.word_ends), opts.strict_tolerance_ms);
  row.edit = std::move(c);
  return row;
}

namespace {

EditCase make_case(const std::string& id, const TimingTrack& baseline, const EditSpec& spec,
                   const std::vector<std::size_t>& word_ends, bool excluded) {
  EditCase c;
  c.case_id = id;
  c.kind = spec.kind;
  c.span_begin = spec.begin;
  c.span_end = spec.end;
  c.value = spec.value;
  c.baseline = baseline;
  c.edited = apply_edit(baseline, spec);
  c.word_ends = word_ends;
  c.excluded_from_aggregates = excluded;
  return c;
}

}  // namespace

std::vector<EditRow> run_scenario_bench(const ToyModel& model, const World& world, const EditBenchOptions& opts) {
  std::vector<EditRow> rows;
  for (const auto& s : scenario_suite(opts.scenario)) {
    for (const EditSpec* spec : {&s.content_edit, &s.pause_edit}) {
      const std::string id = s.name + "/" + (spec->kind == EditKind::pause_set ? "pause" : "content");
      EditRow row = realize_edit(model, world, make_case(id, s.baseline, *spec, s.word_ends, false), opts,
                                 stream_key(opts.seed, "scenario:" + s.name));
      row.scenario = s.name;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<EditRow> run_stress_bench(const ToyModel& model, const Corpus& corpus, const EditBenchOptions& opts) {
  const World world(corpus.spec.world);
  StressConfig cfg = opts.stress;
  std::vector<EditRow> rows;
  for (const auto& sc : stress_suite(corpus.utterances, cfg)) {
    EditRow row = realize_edit(model, world, make_case(sc.case_id, sc.baseline, sc.spec, sc.word_ends, sc.excluded_from_aggregates),
                               opts, stream_key(opts.seed, "stress:" + sc.utterance_id));
    row.scenario = sc.case_id.substr(sc.case_id.find('/') + 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string config_header(const char* suite, const EditBenchOptions& o) {
  std::ostringstream os;
  os << "# suite=" << suite << " strict=" << (o.strict ? "on" : "off")
     << " strict_tolerance_ms=" << format_real(o.strict_tolerance_ms) << " sampler_steps=" << o.sampler_steps
     << " seed=" << o.seed << "\n";
  return os.str();
}

const char* kind_label(EditKind k) { return k == EditKind::pause_set ? "Pause" : "Content"; }

}  // namespace

std::string format_scenario_report(const std::vector<EditRow>& rows, const EditBenchOptions& opts) {
  std::ostringstream os;
  os << config_header("scenario", opts);
  os << "# baseline content_ms=" << format_real(opts.scenario.content_ms)
     << " punct_ms=" << format_real(opts.scenario.punct_ms) << "\n";
  for (const auto& r : rows) os << "case\t" << r.edit.case_id << "\t" << (r.retained ? "retained" : "dropped") << "\n";
  std::vector<EditCase> kept;
  std::size_t n_content = 0, n_pause = 0;
  for (const auto& r : rows) {
    (r.edit.kind == EditKind::pause_set ? n_pause : n_content)++;
    if (r.retained) kept.push_back(r.edit);
  }
  os << "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %10s %10s %10s %10s %9s %7s\n", "Type", "BaseTgt", "BaseMean", "EditTgt",
                "EditMean", "AbsBias", "N");
  os << buf;
  if (kept.empty()) {
    os << "(no retained rows)\n";
    return os.str();
  }
  for (const auto& b : baseline_bias(kept)) {
    const std::size_t total = b.kind == EditKind::pause_set ? n_pause : n_content;
    std::size_t retained = 0;
    for (const auto& r : rows)
      if (r.retained && (r.edit.kind == EditKind::pause_set) == (b.kind == EditKind::pause_set)) ++retained;
    std::snprintf(buf, sizeof(buf), "%-8s %10.2f %10.2f %10.2f %10.2f %9.2f %3zu/%-3zu\n", kind_label(b.kind),
                  b.base_target, b.base_mean, b.edit_target, b.edit_mean, b.abs_bias, retained, total);
    os << buf;
  }
  return os.str();
}

std::string format_stress_report(const std::vector<EditRow>& rows, const EditBenchOptions& opts) {
  std::ostringstream os;
  os << config_header("stress", opts);
  // Conditions in first-appearance order.
  std::vector<std::string> conditions;
  for (const auto& r : rows)
    if (std::find(conditions.begin(), conditions.end(), r.scenario) == conditions.end()) conditions.push_back(r.scenario);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s %9s %10s %10s %10s %9s\n", "Condition", "Target", "Realized", "Error", "Drift", "N");
  os << buf;
  for (const auto& cond : conditions) {
    std::size_t total = 0, kept = 0;
    double target = 0, realized = 0, error = 0, drift = 0;
    bool excluded = false, is_pause = false;
    for (const auto& r : rows) {
      if (r.scenario != cond) continue;
      ++total;
      excluded = r.edit.excluded_from_aggregates;
      is_pause = r.edit.kind == EditKind::pause_set;
      if (!r.retained) continue;
      ++kept;
      const auto& e = r.edit;
      if (is_pause) {
        const double got = frames_to_ms(double(e.realized_edited.track.timings[e.span_begin].pause), e.baseline.rate);
        const double want = frames_to_ms(double(e.edited.timings[e.span_begin].pause), e.baseline.rate);
        target += want;
        realized += got;
        error += std::fabs(got - want);
        drift += pause_neighbor_drift_ms(e);
      } else {
        const auto s = span_ratio(e);
        target += e.value;
        realized += s.realized_factor;
        error += s.error_ms;
        drift += s.neighbor_drift_ms;
      }
    }
    const double n = kept ? double(kept) : 1.0;
    const char* f = is_pause ? "%-14s %9.1f %10.1f %10.2f %10.2f %4zu/%-4zu%s\n" : "%-14s %9.2f %10.3f %10.2f %10.2f %4zu/%-4zu%s\n";
    std::snprintf(buf, sizeof(buf), f, cond.c_str(), target / n, realized / n, error / n, drift / n, kept, total,
                  excluded ? "  (excluded)" : "");
    os << buf;
  }
  for (const auto& r : rows) os << "case\t" << r.edit.case_id << "\t" << (r.retained ? "retained" : "dropped") << "\n";
  return os.str();
}

}  // namespace tempo
