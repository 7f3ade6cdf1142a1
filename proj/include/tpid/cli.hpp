#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpid/baselines.hpp"
#include "tpid/binary_io.hpp"
#include "tpid/corpus.hpp"
#include "tpid/embedstore.hpp"
#include "tpid/error.hpp"
#include "tpid/evaluate.hpp"
#include "tpid/inference.hpp"
#include "tpid/models.hpp"
#include "tpid/supervision.hpp"
#include "tpid/synthetic.hpp"
#include "tpid/train.hpp"

namespace tpid::cli {

struct CommandResult {
  int exit_code = 0;
  std::string summary;
  std::vector<std::string> artifacts;
};

// Every flag of the tool; commands read the fields they need.
struct Options {
  std::string corpus;
  std::string embeddings;
  std::string entities;
  std::string entity_out;
  std::string checkpoint;
  std::string synopsis_checkpoint;
  std::string stats;  // path to a stats json, "theory", or empty for fitting on the train split
  std::string predictions;
  std::string input;
  std::string out;
  std::string movie;
  std::string which;
  std::string task = "synopsis";
  std::string variant = "tam";
  std::string split = "test";
  std::string similarity = "literal";
  std::uint64_t seed = 1;
  int jobs = 1;
  int folds = 5;
  int epochs = 300;
  int patience = 10;
  double lr = 1e-3;
  double dropout = 0.2;
  std::size_t hidden = 0;
  std::size_t entity_hidden = 0;
  std::size_t dim = 64;
  int window = 2;
  double window_fraction = 0.20;
  int synth_train = 16;
  int synth_dev = 4;
  int synth_test = 4;
  int synth_length = 30;
  int synth_scenes = 30;
  int synth_jitter = 1;
};

// ---- loading --------------------------------------------------------------------------------

inline void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) throw InputError(std::string("missing required flag --") + flag);
}

inline CorpusSet load_corpus(const std::string& path) {
  require_flag(path, "corpus");
  auto c = parse_corpus(io::read_file(path));
  if (c.movies.empty()) throw InputError("corpus has no movies: " + path);
  return c;
}

inline bool has_suffix(const std::string& s, std::string_view suf) { return s.size() >= suf.size() && s.ends_with(suf); }

inline EmbeddingStore load_store(const std::string& path) {
  require_flag(path, "embeddings");
  const auto bytes = io::read_file(path);
  return has_suffix(path, ".jsonl") ? import_jsonl(bytes) : read_store(bytes);
}

inline std::optional<WordVectorTable> load_entities(const std::string& path) {
  if (path.empty()) return std::nullopt;
  const auto bytes = io::read_file(path);
  if (has_suffix(path, ".txt") || has_suffix(path, ".vec")) return read_word2vec_text(bytes);
  return read_word_table(bytes);
}

inline TpStats load_stats(const Options& o, const CorpusSet& corpus) {
  if (o.stats == "theory") return theory_stats();
  if (o.stats.empty()) return fit_position_stats(corpus, Split::Train);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(o.stats));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("stats file " + o.stats + ": " + e.what());
  }
  return stats_from_json(j);
}

// Movies of the requested split ("all" selects every movie).
inline std::vector<const Movie*> select_movies(const CorpusSet& c, const std::string& split) {
  if (split == "all") {
    std::vector<const Movie*> out;
    for (const auto& m : c.movies) out.push_back(&m);
    return out;
  }
  const auto s = parse_split(split);
  if (!s) throw InputError("unknown split '" + split + "' (train, dev, test, all)");
  return c.in_split(*s);
}

inline bool has_gold(const Movie& m, Task task) {
  return task == Task::Synopsis ? !m.synopsis_annotations.empty() : !m.screenplay_annotations.empty();
}

inline std::string safe_name(std::string_view id) {
  std::string s(id);
  for (char& ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
  return s.empty() ? "_" : s;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir + ": " + ec.message());
}

// ---- predictions files ----------------------------------------------------------------------------

inline std::string predictions_to_json(const std::vector<Prediction>& preds, Task task, const std::string& source) {
  nlohmann::json j;
  j["task"] = task_name(task);
  j["source"] = source;
  auto& arr = j["predictions"] = nlohmann::json::array();
  for (const auto& p : preds) {
    nlohmann::json e{{"movie", p.movie}};
    if (task == Task::Synopsis) e["tp_indices"] = p.tp_indices;
    else e["tp_scenes"] = p.tp_scenes;
    arr.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

inline std::pair<Task, std::vector<Prediction>> predictions_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const Task task = parse_task(j.at("task").get<std::string>());
    std::vector<Prediction> out;
    for (const auto& e : j.at("predictions")) {
      Prediction p;
      p.movie = e.at("movie").get<std::string>();
      if (task == Task::Synopsis) p.tp_indices = e.at("tp_indices").get<std::array<int, kNumTps>>();
      else p.tp_scenes = e.at("tp_scenes").get<std::array<SceneSet, kNumTps>>();
      out.push_back(std::move(p));
    }
    return {task, std::move(out)};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("predictions file: ") + e.what());
  }
}

inline std::string report_file(const std::string& label, const MetricReport& r) {
  nlohmann::json j = report_to_json(r);
  j["label"] = label;
  return j.dump(2) + "\n";
}

// "• sentence" per TP, in TP order.
inline std::string highlights(const Movie& m, const std::array<int, kNumTps>& tps) {
  std::string out;
  for (int t : tps) out += "• " + m.synopsis.at(static_cast<std::size_t>(t)) + "\n";
  return out;
}

// ---- corpus statistics -----------------------------------------------------------------------

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& v) { return {mean_of(v), population_std(v)}; }

struct SplitStats {
  std::string name;
  int movies = 0;
  int turning_points = 0;
  int synopsis_sentences = 0;
  int screenplay_scenes = 0;
  std::size_t synopsis_vocabulary = 0;
  std::size_t screenplay_vocabulary = 0;
  MeanStd synopsis_tokens, synopsis_sentences_per, synopsis_sentence_tokens;
  MeanStd screenplay_tokens, screenplay_sentences, screenplay_scenes_per;
  MeanStd scene_tokens, scene_sentences, scene_sentence_tokens;
};

inline SplitStats split_stats(const std::string& name, const std::vector<const Movie*>& movies) {
  SplitStats s;
  s.name = name;
  std::set<std::string> syn_vocab, scr_vocab;
  std::vector<double> syn_tok, syn_sent, syn_sent_tok, scr_tok, scr_sent, scr_scenes, sc_tok, sc_sent, sc_sent_tok;
  for (const Movie* m : movies) {
    ++s.movies;
    if (!m->synopsis_annotations.empty()) s.turning_points += kNumTps;
    s.synopsis_sentences += m->synopsis_length();
    s.screenplay_scenes += m->screenplay_length();
    double tok = 0;
    for (const auto& sent : m->synopsis) {
      const auto w = text::word_tokens(sent);
      syn_vocab.insert(w.begin(), w.end());
      syn_sent_tok.push_back(static_cast<double>(w.size()));
      tok += static_cast<double>(w.size());
    }
    syn_tok.push_back(tok);
    syn_sent.push_back(m->synopsis_length());
    if (m->screenplay.empty()) continue;
    double stok = 0, ssent = 0;
    for (const auto& sc : m->screenplay) {
      double ctok = 0;
      for (const auto& sent : sc.sentences) {
        const auto w = text::word_tokens(sent);
        scr_vocab.insert(w.begin(), w.end());
        sc_sent_tok.push_back(static_cast<double>(w.size()));
        ctok += static_cast<double>(w.size());
      }
      sc_tok.push_back(ctok);
      sc_sent.push_back(static_cast<double>(sc.sentences.size()));
      stok += ctok;
      ssent += static_cast<double>(sc.sentences.size());
    }
    scr_tok.push_back(stok);
    scr_sent.push_back(ssent);
    scr_scenes.push_back(m->screenplay_length());
  }
  s.synopsis_vocabulary = syn_vocab.size();
  s.screenplay_vocabulary = scr_vocab.size();
  s.synopsis_tokens = mean_std(syn_tok);
  s.synopsis_sentences_per = mean_std(syn_sent);
  s.synopsis_sentence_tokens = mean_std(syn_sent_tok);
  s.screenplay_tokens = mean_std(scr_tok);
  s.screenplay_sentences = mean_std(scr_sent);
  s.screenplay_scenes_per = mean_std(scr_scenes);
  s.scene_tokens = mean_std(sc_tok);
  s.scene_sentences = mean_std(sc_sent);
  s.scene_sentence_tokens = mean_std(sc_sent_tok);
  return s;
}

// One column per split tag present (train, dev, test), or a single "all"
// column for an untagged corpus.
inline std::vector<SplitStats> corpus_stats(const CorpusSet& c) {
  std::vector<SplitStats> out;
  for (Split s : {Split::Train, Split::Dev, Split::Test}) {
    auto ms = c.in_split(s);
    if (!ms.empty()) out.push_back(split_stats(std::string(split_name(s)), ms));
  }
  if (out.empty()) out.push_back(split_stats("all", select_movies(c, "all")));
  return out;
}

inline std::string format_corpus_stats(const std::vector<SplitStats>& cols) {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  auto count = [&](const char* label, auto get) {
    std::vector<std::string> v;
    for (const auto& c : cols) v.push_back(std::to_string(get(c)));
    rows.push_back({label, v});
  };
  auto ms = [&](const char* label, auto get) {
    std::vector<std::string> v;
    for (const auto& c : cols) {
      const MeanStd x = get(c);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.1f (%.1f)", x.mean, x.std);
      v.push_back(buf);
    }
    rows.push_back({label, v});
  };
  auto section = [&](const char* label) { rows.push_back({label, {}}); };
  count("movies", [](const SplitStats& s) { return s.movies; });
  count("turning points", [](const SplitStats& s) { return s.turning_points; });
  count("synopsis sentences", [](const SplitStats& s) { return s.synopsis_sentences; });
  count("screenplay scenes", [](const SplitStats& s) { return s.screenplay_scenes; });
  count("synopsis vocabulary", [](const SplitStats& s) { return s.synopsis_vocabulary; });
  count("screenplay vocabulary", [](const SplitStats& s) { return s.screenplay_vocabulary; });
  section("per synopsis");
  ms("tokens", [](const SplitStats& s) { return s.synopsis_tokens; });
  ms("sentences", [](const SplitStats& s) { return s.synopsis_sentences_per; });
  ms("sentence tokens", [](const SplitStats& s) { return s.synopsis_sentence_tokens; });
  section("per screenplay");
  ms("tokens", [](const SplitStats& s) { return s.screenplay_tokens; });
  ms("sentences", [](const SplitStats& s) { return s.screenplay_sentences; });
  ms("scenes", [](const SplitStats& s) { return s.screenplay_scenes_per; });
  section("per scene");
  ms("tokens", [](const SplitStats& s) { return s.scene_tokens; });
  ms("sentences", [](const SplitStats& s) { return s.scene_sentences; });
  ms("sentence tokens", [](const SplitStats& s) { return s.scene_sentence_tokens; });

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s", "");
  out += buf;
  for (const auto& c : cols) {
    std::snprintf(buf, sizeof buf, "%18s", c.name.c_str());
    out += buf;
  }
  out += "\n";
  for (const auto& [label, vals] : rows) {
    if (vals.empty()) {
      out += "-- " + label + "\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, "%-24s", label.c_str());
    out += buf;
    for (const auto& v : vals) {
      std::snprintf(buf, sizeof buf, "%18s", v.c_str());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

// ---- commands -------------------------------------------------------------------------------------

inline CommandResult write_artifact(CommandResult r, const std::string& path, std::string_view contents) {
  io::write_file(path, contents);
  r.artifacts.push_back(path);
  return r;
}

inline CommandResult cmd_stats(const Options& o) {
  const auto corpus = load_corpus(o.corpus);
  CommandResult r;
  r.summary = format_corpus_stats(corpus_stats(corpus));
  if (!o.out.empty()) r = write_artifact(r, o.out, r.summary);
  return r;
}

inline CommandResult cmd_fit_stats(const Options& o) {
  const auto corpus = load_corpus(o.corpus);
  const auto s = fit_position_stats(corpus, Split::Train);
  CommandResult r;
  char buf[128];
  r.summary = "TP   mu(%)   sigma(%)\n";
  for (int t = 0; t < kNumTps; ++t) {
    std::snprintf(buf, sizeof buf, "%d   %6.2f   %6.2f\n", t + 1, 100.0 * s.mu[t], 100.0 * s.sigma[t]);
    r.summary += buf;
  }
  if (!o.out.empty()) r = write_artifact(r, o.out, stats_to_json(s).dump(2) + "\n");
  return r;
}

inline std::uint64_t movie_seed(std::uint64_t seed, const std::string& id) { return hash_bytes(id, seed); }

// Baseline predictions for one movie.
inline Prediction baseline_prediction(const std::string& which, Task task, const Movie& m, const TpStats& fitted, std::uint64_t seed) {
  Prediction p;
  p.movie = m.id;
  if (task == Task::Synopsis) {
    if (which == "theory") p.tp_indices = position_baseline(m.synopsis_length(), theory_stats());
    else if (which == "distribution") p.tp_indices = position_baseline(m.synopsis_length(), fitted);
    else if (which == "random") p.tp_indices = random_baseline(m.synopsis_length(), movie_seed(seed, m.id));
    else if (which == "tfidf" || which == "tfidf+distribution")
      throw InputError("baseline '" + which + "' applies to the screenplay task only");
    else throw InputError("unknown baseline '" + which + "' (theory, distribution, random, tfidf, tfidf+distribution)");
    return p;
  }
  const int M = m.screenplay_length();
  if (M == 0) throw InputError("movie '" + m.id + "' has no screenplay");
  if (which == "theory") p.tp_scenes = position_baseline_scenes(M, theory_stats());
  else if (which == "distribution") p.tp_scenes = position_baseline_scenes(M, fitted);
  else if (which == "random") p.tp_scenes = random_baseline_scenes(M, movie_seed(seed, m.id));
  else if (which == "tfidf" || which == "tfidf+distribution") {
    const auto tps = detail::screenplay_tp_input(m, fitted);
    std::array<std::string, kNumTps> sents;
    for (int t = 0; t < kNumTps; ++t) sents[t] = m.synopsis.at(static_cast<std::size_t>(tps[t]));
    const auto res = tfidf_scene_scores(sents, m.screenplay, which == "tfidf" ? std::nullopt : std::optional<TpStats>(fitted));
    p.tp_scenes = res.selected;
  } else {
    throw InputError("unknown baseline '" + which + "' (theory, distribution, random, tfidf, tfidf+distribution)");
  }
  return p;
}

inline CommandResult cmd_baseline(const Options& o) {
  require_flag(o.which, "which");
  const auto corpus = load_corpus(o.corpus);
  const Task task = parse_task(o.task);
  const bool needs_fit = o.which == "distribution" || o.which == "tfidf+distribution" || o.which == "tfidf";
  const TpStats fitted = needs_fit ? load_stats(o, corpus) : theory_stats();
  std::vector<Prediction> preds;
  for (const Movie* m : select_movies(corpus, o.split))
    if (has_gold(*m, task)) preds.push_back(baseline_prediction(o.which, task, *m, fitted, o.seed));
  if (preds.empty())
    throw InputError("no movies with gold " + std::string(task_name(task)) + " annotations in split '" + o.split + "'");
  const auto report = evaluate_run(preds, corpus, task);
  CommandResult r;
  r.summary = format_report_table({{o.which, report}});
  if (!o.out.empty()) {
    ensure_dir(o.out);
    r = write_artifact(r, join_path(o.out, "predictions.json"), predictions_to_json(preds, task, "baseline:" + o.which));
    r = write_artifact(r, join_path(o.out, "report.json"), report_file(o.which, report));
  }
  return r;
}

inline TrainConfig train_config(const Options& o) {
  TrainConfig c;
  c.task = parse_task(o.task);
  c.variant = o.variant;
  c.epochs = o.epochs;
  c.patience = o.patience;
  c.lr = o.lr;
  c.seed = o.seed;
  c.dropout = o.dropout;
  c.hidden = o.hidden;
  c.entity_hidden = o.entity_hidden;
  c.window = o.window;
  c.window_fraction = o.window_fraction;
  c.similarity = parse_similarity(o.similarity);
  return c;
}

inline std::string format_epoch(const EpochRecord& e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch %3d  loss %.6f  dev TA %6.2f  PA %6.2f  D %6.2f\n", e.epoch, e.train_loss, e.dev_ta,
                e.dev_pa, e.dev_d);
  return buf;
}

inline CommandResult cmd_train(const Options& o, std::FILE* log = nullptr) {
  require_flag(o.out, "out");
  const auto corpus = load_corpus(o.corpus);
  const auto store = load_store(o.embeddings);
  const auto entities = load_entities(o.entities);
  const auto cfg = train_config(o);
  std::string history;
  auto on_epoch = [&](const EpochRecord& e) {
    const auto line = format_epoch(e);
    history += line;
    if (log) std::fputs(line.c_str(), log);
  };
  const WordVectorTable* ent = entities ? &*entities : nullptr;
  auto ck = cfg.task == Task::Synopsis ? train_synopsis(cfg, corpus, store, ent, on_epoch)
                                       : train_screenplay(cfg, corpus, store, load_stats(o, corpus), ent, on_epoch);
  save_checkpoint(ck, o.out);
  CommandResult r;
  r.artifacts = {o.out, sidecar_path(o.out)};
  const auto& best = ck.history.at(static_cast<std::size_t>(ck.best_epoch));
  r.summary = history + "selected epoch " + std::to_string(ck.best_epoch) + ": " + format_epoch(best);
  return r;
}

inline std::optional<std::array<SceneSet, kNumTps>> gold_sets(const Movie& m, Task task) {
  if (task == Task::Synopsis) {
    if (m.synopsis_annotations.empty()) return std::nullopt;
    std::array<SceneSet, kNumTps> g;
    for (int t = 0; t < kNumTps; ++t) g[t] = {m.synopsis_annotations.front().tp_indices[t]};
    return g;
  }
  if (m.screenplay_annotations.empty()) return std::nullopt;
  return m.screenplay_annotations.front().tp_scene_sets;
}

struct Predictor {
  Checkpoint ck;
  std::optional<Checkpoint> synopsis_stage;
  const EmbeddingStore* store = nullptr;
  const WordVectorTable* entities = nullptr;

  PosteriorTrace run(const Movie& m) {
    if (ck.synopsis) return predict_synopsis(*ck.synopsis, m, synopsis_features(m, *store, entities), ck.stats);
    if (synopsis_stage)
      return end_to_end(*synopsis_stage->synopsis, *ck.screenplay, m, *store, entities, synopsis_stage->stats);
    return predict_screenplay(*ck.screenplay, m, screenplay_features(m, *store, entities), detail::screenplay_tp_input(m, ck.stats));
  }
};

inline Predictor make_predictor(const Options& o, const EmbeddingStore& store, const WordVectorTable* entities) {
  require_flag(o.checkpoint, "checkpoint");
  Predictor p;
  p.ck = load_checkpoint(o.checkpoint);
  p.store = &store;
  p.entities = entities;
  detail::require_dim(store, p.ck.input_dim());
  if (p.ck.synopsis) require_entity_table(p.ck.synopsis->cfg.variant, entities, p.ck.synopsis->cfg.entity_dim);
  if (p.ck.screenplay) require_entity_table(p.ck.screenplay->cfg.variant, entities, p.ck.screenplay->cfg.entity_dim);
  if (!o.synopsis_checkpoint.empty()) {
    if (!p.ck.screenplay) throw InputError("--synopsis-checkpoint only applies to a screenplay checkpoint");
    p.synopsis_stage = load_checkpoint(o.synopsis_checkpoint);
    if (!p.synopsis_stage->synopsis) throw InputError("--synopsis-checkpoint is not a synopsis checkpoint");
  }
  return p;
}

inline CommandResult cmd_predict(const Options& o) {
  require_flag(o.out, "out");
  const auto corpus = load_corpus(o.corpus);
  const auto store = load_store(o.embeddings);
  const auto entities = load_entities(o.entities);
  auto pred = make_predictor(o, store, entities ? &*entities : nullptr);
  const auto movies = select_movies(corpus, o.split);
  if (movies.empty()) throw InputError("no movies in split '" + o.split + "'");
  std::vector<PosteriorTrace> traces(movies.size());
  parallel_for(movies.size(), o.jobs, [&](std::size_t i) { traces[i] = pred.run(*movies[i]); });

  ensure_dir(o.out);
  CommandResult r;
  std::vector<Prediction> preds;
  const Task task = pred.ck.task();
  for (std::size_t i = 0; i < movies.size(); ++i) {
    const Movie& m = *movies[i];
    preds.push_back(traces[i].prediction());
    const auto base = safe_name(m.id);
    r = write_artifact(r, join_path(o.out, base + ".posteriors.csv"), trace_csv(traces[i]));
    if (task == Task::Synopsis)
      r = write_artifact(r, join_path(o.out, base + ".highlights.txt"), highlights(m, traces[i].selected_sentences));
  }
  r = write_artifact(r, join_path(o.out, "predictions.json"), predictions_to_json(preds, task, "checkpoint:" + pred.ck.tag()));
  r.summary = "predicted " + std::to_string(preds.size()) + " movies with " + pred.ck.tag() + "\n";
  return r;
}

inline CommandResult cmd_eval(const Options& o) {
  require_flag(o.predictions, "predictions");
  const auto corpus = load_corpus(o.corpus);
  const auto [task, preds] = predictions_from_json(io::read_file(o.predictions));
  const auto report = evaluate_run(preds, corpus, task);
  CommandResult r;
  r.summary = format_report_table({{"predictions", report}});
  if (!o.out.empty()) r = write_artifact(r, o.out, report_file("predictions", report));
  return r;
}

inline CommandResult cmd_export_posteriors(const Options& o) {
  require_flag(o.movie, "movie");
  require_flag(o.out, "out");
  const auto corpus = load_corpus(o.corpus);
  const Movie* m = corpus.find(o.movie);
  if (!m) throw InputError("movie not in corpus: " + o.movie);
  const auto store = load_store(o.embeddings);
  const auto entities = load_entities(o.entities);
  auto pred = make_predictor(o, store, entities ? &*entities : nullptr);
  const auto tr = pred.run(*m);
  CommandResult r;
  r = write_artifact(r, o.out, trace_csv(tr, true, gold_sets(*m, tr.kind)));
  r.summary = "wrote posteriors for " + m->id + "\n";
  return r;
}

inline CommandResult cmd_crossval(const Options& o) {
  const auto corpus = load_corpus(o.corpus);
  const auto store = load_store(o.embeddings);
  const auto entities = load_entities(o.entities);
  auto cfg = train_config(o);
  if (cfg.task != Task::Screenplay) throw InputError("crossval runs on the screenplay task; pass --task screenplay");
  const auto stats = load_stats(o, corpus);
  const auto res = run_crossval(cfg, corpus, store, stats, o.folds, entities ? &*entities : nullptr, o.jobs);
  std::vector<std::pair<std::string, MetricReport>> rows;
  for (std::size_t f = 0; f < res.per_fold.size(); ++f) rows.push_back({"fold " + std::to_string(f + 1), res.per_fold[f]});
  rows.push_back({"aggregate", res.aggregate});
  CommandResult r;
  r.summary = format_report_table(rows);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    nlohmann::json j;
    j["aggregate"] = report_to_json(res.aggregate);
    j["folds"] = nlohmann::json::array();
    for (std::size_t f = 0; f < res.per_fold.size(); ++f)
      j["folds"].push_back({{"movies", res.plan.folds[f]}, {"report", report_to_json(res.per_fold[f])}});
    r = write_artifact(r, join_path(o.out, "crossval.json"), j.dump(2) + "\n");
    r = write_artifact(r, join_path(o.out, "predictions.json"), predictions_to_json(res.predictions, Task::Screenplay, "crossval:" + cfg.variant));
  }
  return r;
}

inline CommandResult cmd_hash_embed(const Options& o) {
  require_flag(o.out, "out");
  const auto corpus = load_corpus(o.corpus);
  if (o.dim == 0) throw InputError("--dim must be positive");
  const auto store = hash_embed_corpus(corpus, o.dim, o.seed);
  CommandResult r;
  r = write_artifact(r, o.out, has_suffix(o.out, ".jsonl") ? export_jsonl(store) : write_store(store));
  if (!o.entity_out.empty()) r = write_artifact(r, o.entity_out, write_word_table(hash_word_table(corpus, o.dim, o.seed)));
  r.summary = "embedded " + std::to_string(store.size()) + " sentences, dim " + std::to_string(o.dim) + "\n";
  return r;
}

inline CommandResult cmd_synth(const Options& o) {
  require_flag(o.out, "out");
  SyntheticConfig sc;
  sc.train_movies = o.synth_train;
  sc.dev_movies = o.synth_dev;
  sc.test_movies = o.synth_test;
  sc.synopsis_length = o.synth_length;
  sc.scenes = o.synth_scenes;
  sc.jitter = o.synth_jitter;
  sc.seed = o.seed;
  if (sc.train_movies < 1 || sc.dev_movies < 0 || sc.test_movies < 0 || sc.jitter < 0)
    throw InputError("synth: movie counts and jitter must be non-negative, with at least one train movie");
  if (sc.synopsis_length < 10 || sc.scenes < 10) throw InputError("synth: need at least 10 sentences and 10 scenes");
  CorpusSet c;
  try {
    c = make_synthetic_corpus(sc);
  } catch (const ContractError& e) {
    throw InputError(e.what());
  }
  CommandResult r;
  r = write_artifact(r, o.out, serialize_corpus(c, 2) + "\n");
  r.summary = "wrote " + std::to_string(c.movies.size()) + " synthetic movies\n";
  return r;
}

inline CommandResult cmd_split_scenes(const Options& o) {
  require_flag(o.input, "input");
  std::vector<Scene> scenes;
  const auto raw = io::read_file(o.input);
  if (text::trim(raw).empty()) throw InputError("screenplay text is blank: " + o.input);
  scenes = split_scenes(raw);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : scenes) j.push_back({{"heading", s.heading}, {"sentences", s.sentences}});
  CommandResult r;
  const auto text = j.dump(2) + "\n";
  if (!o.out.empty()) r = write_artifact(r, o.out, text);
  else r.summary = text;
  if (!o.out.empty()) r.summary = std::to_string(scenes.size()) + " scenes\n";
  return r;
}

}  // namespace tpid::cli
