#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
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
#include "tpid/nn/adam.hpp"
#include "tpid/nn/checkpoint_io.hpp"
#include "tpid/rng.hpp"
#include "tpid/supervision.hpp"

namespace tpid {

// Zero for hidden sizes means "use the model default".
struct TrainConfig {
  Task task = Task::Synopsis;
  std::string variant = "tam";
  int epochs = 300;
  int patience = 10;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  double dropout = 0.2;
  std::size_t hidden = 0;
  std::size_t entity_hidden = 0;
  int window = 2;
  double window_fraction = 0.20;
  SimilarityMode similarity = SimilarityMode::Literal;

  bool operator==(const TrainConfig&) const = default;
};

inline void validate(const TrainConfig& c) {
  if (c.epochs < 1) throw InputError("train config: epochs must be >= 1, got " + std::to_string(c.epochs));
  if (c.patience < 1) throw InputError("train config: patience must be >= 1, got " + std::to_string(c.patience));
  if (!(c.lr > 0.0)) throw InputError("train config: learning rate must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw InputError("train config: dropout must lie in [0, 1)");
  if (c.task == Task::Synopsis) parse_synopsis_variant(c.variant);
  else parse_screenplay_variant(c.variant);
}

inline nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"task", task_name(c.task)},
          {"variant", c.variant},
          {"epochs", c.epochs},
          {"patience", c.patience},
          {"lr", c.lr},
          {"seed", c.seed},
          {"dropout", c.dropout},
          {"hidden", c.hidden},
          {"entity_hidden", c.entity_hidden},
          {"window", c.window},
          {"window_fraction", c.window_fraction},
          {"similarity", c.similarity == SimilarityMode::Literal ? "literal" : "euclidean"}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.task = parse_task(j.at("task").get<std::string>());
    c.variant = j.at("variant").get<std::string>();
    c.epochs = j.at("epochs").get<int>();
    c.patience = j.at("patience").get<int>();
    c.lr = j.at("lr").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.dropout = j.at("dropout").get<double>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.entity_hidden = j.at("entity_hidden").get<std::size_t>();
    c.window = j.at("window").get<int>();
    c.window_fraction = j.at("window_fraction").get<double>();
    c.similarity = parse_similarity(j.at("similarity").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("train config: ") + e.what());
  }
  return c;
}

inline SynopsisModelConfig synopsis_model_config(const TrainConfig& c, std::size_t input_dim, std::size_t entity_dim) {
  SynopsisModelConfig m;
  m.variant = parse_synopsis_variant(c.variant);
  m.input_dim = input_dim;
  if (c.hidden) m.hidden = c.hidden;
  if (c.entity_hidden) m.entity_hidden = c.entity_hidden;
  if (entity_dim) m.entity_dim = entity_dim;
  m.window = c.window;
  m.dropout = c.dropout;
  m.similarity = c.similarity;
  return m;
}

inline ScreenplayModelConfig screenplay_model_config(const TrainConfig& c, std::size_t input_dim, std::size_t entity_dim) {
  ScreenplayModelConfig m;
  m.variant = parse_screenplay_variant(c.variant);
  m.input_dim = input_dim;
  if (c.hidden) m.hidden = c.hidden;
  if (c.entity_hidden) m.entity_hidden = c.entity_hidden;
  if (entity_dim) m.entity_dim = entity_dim;
  m.window_fraction = c.window_fraction;
  m.dropout = c.dropout;
  m.similarity = c.similarity;
  return m;
}

// Epoch 0 is the untrained model.
struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_ta = 0.0;
  double dev_pa = 0.0;
  double dev_d = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct Checkpoint {
  TrainConfig config;
  std::optional<SynopsisModel> synopsis;
  std::optional<ScreenplayModel> screenplay;
  TpStats stats;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  nn::AdamState adam;

  Task task() const { return synopsis ? Task::Synopsis : Task::Screenplay; }
  std::string tag() const { return std::string(task_name(task())) + "/" + config.variant; }

  nn::ParamList params() {
    if (synopsis) return synopsis->params();
    if (screenplay) return screenplay->params();
    throw StateError("checkpoint holds no model");
  }

  std::size_t input_dim() const { return synopsis ? synopsis->cfg.input_dim : screenplay->cfg.input_dim; }
};

// ---- checkpoint files ------------------------------------------------------------------------

inline std::string checkpoint_bytes(Checkpoint& ck) {
  return nn::write_params(ck.tag(), ck.config.seed, ck.params(), &ck.adam);
}

inline std::string checkpoint_sidecar(const Checkpoint& ck) {
  nlohmann::json j;
  j["format"] = "tpid-checkpoint";
  j["task"] = task_name(ck.task());
  j["train"] = train_config_to_json(ck.config);
  j["model"] = ck.synopsis ? config_to_json(ck.synopsis->cfg) : config_to_json(ck.screenplay->cfg);
  j["stats"] = stats_to_json(ck.stats);
  j["best_epoch"] = ck.best_epoch;
  auto& h = j["history"] = nlohmann::json::array();
  for (const auto& r : ck.history)
    h.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"dev_ta", r.dev_ta}, {"dev_pa", r.dev_pa}, {"dev_d", r.dev_d}});
  return j.dump(2) + "\n";
}

inline Checkpoint checkpoint_from_parts(std::string_view bytes, std::string_view sidecar) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(sidecar);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint sidecar: ") + e.what());
  }
  Checkpoint ck;
  try {
    if (j.at("format") != "tpid-checkpoint") throw InputError("checkpoint sidecar: unknown format");
    ck.config = train_config_from_json(j.at("train"));
    const Task task = parse_task(j.at("task").get<std::string>());
    if (task == Task::Synopsis) ck.synopsis.emplace(synopsis_config_from_json(j.at("model")));
    else ck.screenplay.emplace(screenplay_config_from_json(j.at("model")));
    ck.stats = stats_from_json(j.at("stats"));
    ck.best_epoch = j.at("best_epoch").get<int>();
    for (const auto& r : j.at("history"))
      ck.history.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<double>(), r.at("dev_ta").get<double>(),
                            r.at("dev_pa").get<double>(), r.at("dev_d").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint sidecar: ") + e.what());
  } catch (const ContractError& e) {
    throw InputError(std::string("checkpoint sidecar: ") + e.what());
  }
  auto file = nn::read_params(bytes);
  if (file.variant != ck.tag())
    throw InputError("checkpoint: binary is tagged '" + file.variant + "' but the sidecar describes '" + ck.tag() + "'");
  const auto params = ck.params();
  nn::load_params(file, params);
  ck.adam = file.adam ? *file.adam : nn::AdamState(params);
  return ck;
}

inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

inline void save_checkpoint(Checkpoint& ck, const std::string& path) {
  io::write_file(path, checkpoint_bytes(ck));
  io::write_file(sidecar_path(path), checkpoint_sidecar(ck));
}

inline Checkpoint load_checkpoint(const std::string& path) {
  const auto bytes = io::read_file(path);
  std::string side;
  try {
    side = io::read_file(sidecar_path(path));
  } catch (const InputError&) {
    throw InputError("checkpoint sidecar missing: " + sidecar_path(path));
  }
  return checkpoint_from_parts(bytes, side);
}

// ---- shared helpers -----------------------------------------------------------------------------

using EpochCallback = std::function<void(const EpochRecord&)>;

namespace detail {

inline std::vector<const Movie*> with_synopsis_gold(const std::vector<const Movie*>& ms) {
  std::vector<const Movie*> out;
  for (const Movie* m : ms)
    if (!m->synopsis_annotations.empty()) out.push_back(m);
  return out;
}

inline std::vector<std::uint8_t> tp_indicator(int n, const std::array<int, kNumTps>& tps) {
  std::vector<std::uint8_t> y(static_cast<std::size_t>(n), 0);
  for (int t : tps) y.at(static_cast<std::size_t>(t)) = 1;
  return y;
}

// True when `cand` should replace `best` as the selected epoch.
inline bool better_synopsis(const EpochRecord& cand, const std::optional<EpochRecord>& best) {
  if (!best) return true;
  return cand.dev_ta > best->dev_ta || (cand.dev_ta == best->dev_ta && cand.dev_d < best->dev_d);
}

inline bool better_screenplay(const EpochRecord& cand, const std::optional<EpochRecord>& best) {
  if (!best) return true;
  return cand.dev_d < best->dev_d || (cand.dev_d == best->dev_d && cand.dev_ta > best->dev_ta);
}

// TP sentence indices used as screenplay model input: the first gold
// synopsis annotation, else the position baseline under `stats`.
inline std::array<int, kNumTps> screenplay_tp_input(const Movie& m, const TpStats& stats) {
  if (!m.synopsis_annotations.empty()) return m.synopsis_annotations.front().tp_indices;
  return position_baseline(m.synopsis_length(), stats);
}

// Pseudo-gold scene sets from the noisy labels.
inline ScreenplayAnnotation pseudo_gold(int M, const TpStats& stats) {
  const auto rows = make_noisy_labels(M, stats);
  ScreenplayAnnotation a{"noisy", {}};
  for (int t = 0; t < kNumTps; ++t)
    for (int i = 0; i < M; ++i)
      if (rows[t][static_cast<std::size_t>(i)]) a.tp_scene_sets[t].push_back(i);
  return a;
}

}  // namespace detail

// ---- synopsis -------------------------------------------------------------------------------------

struct SynopsisData {
  std::vector<std::vector<SentenceFeatures>> inputs;
  std::vector<std::vector<std::uint8_t>> labels;
};

inline SynopsisData synopsis_training_data(const std::vector<TrainingInstance>& instances, const EmbeddingStore& store,
                                           const WordVectorTable* entities) {
  SynopsisData d;
  for (const auto& inst : instances) {
    d.inputs.push_back(synopsis_features(*inst.movie, store, entities));
    d.labels.push_back(detail::tp_indicator(inst.movie->synopsis_length(), inst.synopsis_annotation().tp_indices));
  }
  return d;
}

inline ClassWeights synopsis_class_weights(const SynopsisData& d) {
  std::size_t pos = 0, total = 0;
  for (const auto& y : d.labels) {
    pos += static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    total += y.size();
  }
  return class_weights(pos, total - pos);
}

// Mean loss over the data, dropout off.
inline double synopsis_data_loss(SynopsisModel& m, const SynopsisData& d, ClassWeights w) {
  double sum = 0.0;
  for (std::size_t k = 0; k < d.inputs.size(); ++k) {
    nn::Tape<float> tape;
    sum += synopsis_loss(tape, m, d.inputs[k], d.labels[k], w).scalar();
  }
  return d.inputs.empty() ? 0.0 : sum / static_cast<double>(d.inputs.size());
}

inline Checkpoint train_synopsis(const TrainConfig& cfg, const CorpusSet& corpus, const EmbeddingStore& store,
                                 const WordVectorTable* entities = nullptr, const EpochCallback& on_epoch = {}) {
  validate(cfg);
  if (cfg.task != Task::Synopsis) throw InputError("train_synopsis: config task is " + std::string(task_name(cfg.task)));
  const auto train = detail::with_synopsis_gold(corpus.in_split(Split::Train));
  if (train.empty()) throw InputError("train_synopsis: no annotated movies in the train split");
  auto dev = detail::with_synopsis_gold(corpus.in_split(Split::Dev));
  if (dev.empty()) dev = train;

  const auto variant = parse_synopsis_variant(cfg.variant);
  require_entity_table(variant, entities, entities ? entities->dim() : 0);
  for (const Movie* m : train) detail::require_coverage(*m, store, true, false);
  for (const Movie* m : dev) detail::require_coverage(*m, store, true, false);

  Checkpoint ck;
  ck.config = cfg;
  ck.stats = fit_position_stats(train);
  const auto data = synopsis_training_data(augment_training_set(train), store, entities);
  const auto w = synopsis_class_weights(data);
  std::vector<std::vector<SentenceFeatures>> dev_inputs;
  for (const Movie* m : dev) dev_inputs.push_back(synopsis_features(*m, store, entities));

  SynopsisModel model(synopsis_model_config(cfg, store.dim(), entities && uses_entities(variant) ? entities->dim() : 0));
  Rng rng(cfg.seed);
  model.init(rng);
  const auto params = model.params();
  nn::AdamState adam(params, nn::AdamConfig{cfg.lr});

  auto evaluate_dev = [&](int epoch) {
    std::vector<Prediction> preds;
    for (std::size_t k = 0; k < dev.size(); ++k) preds.push_back(predict_synopsis(model, *dev[k], dev_inputs[k], ck.stats).prediction());
    const auto r = evaluate_run(preds, corpus, Task::Synopsis);
    return EpochRecord{epoch, synopsis_data_loss(model, data, w), r.ta, r.pa, r.d_mean};
  };

  ck.history.push_back(evaluate_dev(0));
  if (on_epoch) on_epoch(ck.history.back());
  std::optional<EpochRecord> best;
  int stale = 0;
  std::vector<std::size_t> order(data.inputs.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t k : order) {
      nn::Tape<float> tape;
      auto loss = synopsis_loss(tape, model, data.inputs[k], data.labels[k], w, &rng, true);
      nn::zero_grads(params);
      tape.backward(loss);
      nn::adam_step(adam, params);
    }
    const auto rec = evaluate_dev(epoch);
    ck.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (detail::better_synopsis(rec, best)) {
      best = rec;
      ck.best_epoch = epoch;
      ck.synopsis = model;
      ck.adam = adam;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return ck;
}

// ---- screenplay -----------------------------------------------------------------------------------

struct ScreenplayData {
  std::vector<ScreenplayInput> inputs;
  std::vector<std::array<int, kNumTps>> tps;
  std::vector<LabelRows> labels;
};

inline ClassWeights screenplay_class_weights(const ScreenplayData& d) {
  std::size_t pos = 0, total = 0;
  for (const auto& rows : d.labels)
    for (const auto& r : rows) {
      pos += static_cast<std::size_t>(std::count(r.begin(), r.end(), 1));
      total += r.size();
    }
  return class_weights(pos, total - pos);
}

inline double screenplay_data_loss(ScreenplayModel& m, const ScreenplayData& d, ClassWeights w) {
  double sum = 0.0;
  for (std::size_t k = 0; k < d.inputs.size(); ++k) {
    nn::Tape<float> tape;
    sum += screenplay_loss(tape, m, d.inputs[k], d.tps[k], d.labels[k], w).scalar();
  }
  return d.inputs.empty() ? 0.0 : sum / static_cast<double>(d.inputs.size());
}

inline ScreenplayData screenplay_training_data(const std::vector<const Movie*>& movies, const EmbeddingStore& store,
                                               const WordVectorTable* entities, const TpStats& stats) {
  std::vector<std::string> missing;
  for (const Movie* m : movies)
    if (m->synopsis_annotations.empty()) missing.push_back(m->id);
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw InputError("train_screenplay: training movies need gold synopsis TPs: " + list);
  }
  ScreenplayData d;
  for (const Movie* m : movies) {
    d.inputs.push_back(screenplay_features(*m, store, entities));
    d.tps.push_back(m->synopsis_annotations.front().tp_indices);
    d.labels.push_back(make_noisy_labels(m->screenplay_length(), stats));
  }
  return d;
}

// Dev selection uses gold screenplay annotations when the dev movies have
// them, noisy-label pseudo-gold otherwise.
inline Checkpoint train_screenplay(const TrainConfig& cfg, const CorpusSet& corpus, const EmbeddingStore& store,
                                   const TpStats& stats, const WordVectorTable* entities = nullptr,
                                   const EpochCallback& on_epoch = {}) {
  validate(cfg);
  validate_stats(stats);
  if (cfg.task != Task::Screenplay) throw InputError("train_screenplay: config task is " + std::string(task_name(cfg.task)));
  const auto train = corpus.in_split(Split::Train);
  if (train.empty()) throw InputError("train_screenplay: train split is empty");
  auto dev = corpus.in_split(Split::Dev);
  if (dev.empty()) dev = train;

  const auto variant = parse_screenplay_variant(cfg.variant);
  require_entity_table(variant, entities, entities ? entities->dim() : 0);
  for (const Movie* m : train) detail::require_coverage(*m, store, true, true);
  for (const Movie* m : dev) detail::require_coverage(*m, store, true, true);

  Checkpoint ck;
  ck.config = cfg;
  ck.stats = stats;
  const auto data = screenplay_training_data(train, store, entities, stats);
  const auto w = screenplay_class_weights(data);

  CorpusSet dev_gold;
  std::vector<ScreenplayInput> dev_inputs;
  std::vector<std::array<int, kNumTps>> dev_tps;
  for (const Movie* m : dev) {
    Movie g = *m;
    if (g.screenplay_annotations.empty()) g.screenplay_annotations.push_back(detail::pseudo_gold(g.screenplay_length(), stats));
    dev_gold.movies.push_back(std::move(g));
    dev_inputs.push_back(screenplay_features(*m, store, entities));
    dev_tps.push_back(detail::screenplay_tp_input(*m, stats));
  }

  ScreenplayModel model(screenplay_model_config(cfg, store.dim(), entities && uses_entities(variant) ? entities->dim() : 0));
  Rng rng(cfg.seed);
  model.init(rng);
  const auto params = model.params();
  nn::AdamState adam(params, nn::AdamConfig{cfg.lr});

  auto evaluate_dev = [&](int epoch) {
    std::vector<Prediction> preds;
    for (std::size_t k = 0; k < dev.size(); ++k)
      preds.push_back(predict_screenplay(model, *dev[k], dev_inputs[k], dev_tps[k]).prediction());
    const auto r = evaluate_run(preds, dev_gold, Task::Screenplay);
    return EpochRecord{epoch, screenplay_data_loss(model, data, w), r.ta, r.pa, r.d_mean};
  };

  ck.history.push_back(evaluate_dev(0));
  if (on_epoch) on_epoch(ck.history.back());
  std::optional<EpochRecord> best;
  int stale = 0;
  std::vector<std::size_t> order(data.inputs.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t k : order) {
      nn::Tape<float> tape;
      auto loss = screenplay_loss(tape, model, data.inputs[k], data.tps[k], data.labels[k], w, &rng, true);
      nn::zero_grads(params);
      tape.backward(loss);
      nn::adam_step(adam, params);
    }
    const auto rec = evaluate_dev(epoch);
    ck.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (detail::better_screenplay(rec, best)) {
      best = rec;
      ck.best_epoch = epoch;
      ck.screenplay = model;
      ck.adam = adam;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return ck;
}

inline Checkpoint train(const TrainConfig& cfg, const CorpusSet& corpus, const EmbeddingStore& store,
                        const std::optional<TpStats>& stats = std::nullopt, const WordVectorTable* entities = nullptr,
                        const EpochCallback& on_epoch = {}) {
  if (cfg.task == Task::Synopsis) return train_synopsis(cfg, corpus, store, entities, on_epoch);
  return train_screenplay(cfg, corpus, store, stats ? *stats : fit_position_stats(corpus), entities, on_epoch);
}

// ---- cross-validation -------------------------------------------------------------------------------

struct CrossvalResult {
  MetricReport aggregate;
  std::vector<MetricReport> per_fold;
  std::vector<Prediction> predictions;  // fold order
  FoldPlan plan;
};

// Runs `jobs` workers over indices [0, n); results are written by index so
// the outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Folds over movies with gold screenplay annotations. Each fold is the test
// set, the other gold movies select the epoch, and the train split (minus
// gold movies) supplies the noisy-label training data.
inline CrossvalResult run_crossval(const TrainConfig& cfg, const CorpusSet& corpus, const EmbeddingStore& store,
                                   const TpStats& stats, int k = 5, const WordVectorTable* entities = nullptr, int jobs = 1) {
  std::vector<std::string> gold_ids;
  for (const auto& m : corpus.movies)
    if (!m.screenplay_annotations.empty()) gold_ids.push_back(m.id);
  if (static_cast<int>(gold_ids.size()) < k)
    throw InputError("crossval: " + std::to_string(k) + " folds need at least " + std::to_string(k) +
                     " movies with gold screenplay annotations, found " + std::to_string(gold_ids.size()));
  CrossvalResult res;
  res.plan = make_folds(gold_ids, k, cfg.seed);
  std::vector<std::vector<Prediction>> fold_preds(static_cast<std::size_t>(k));
  res.per_fold.resize(static_cast<std::size_t>(k));

  parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t f) {
    const auto& test_ids = res.plan.folds[f];
    CorpusSet fold;
    fold.movies = corpus.movies;
    for (const auto& m : corpus.movies) {
      const bool gold = !m.screenplay_annotations.empty();
      const bool in_test = std::find(test_ids.begin(), test_ids.end(), m.id) != test_ids.end();
      auto it = corpus.split_tags.find(m.id);
      if (in_test) fold.split_tags[m.id] = Split::Test;
      else if (gold) fold.split_tags[m.id] = Split::Dev;
      else if (it != corpus.split_tags.end() && it->second == Split::Train) fold.split_tags[m.id] = Split::Train;
    }
    auto ck = train_screenplay(cfg, fold, store, stats, entities);
    std::vector<Prediction> preds;
    for (const auto& id : test_ids) {
      const Movie& m = corpus.at(id);
      auto input = screenplay_features(m, store, entities);
      preds.push_back(predict_screenplay(*ck.screenplay, m, input, detail::screenplay_tp_input(m, ck.stats)).prediction());
    }
    res.per_fold[f] = evaluate_run(preds, corpus, Task::Screenplay);
    fold_preds[f] = std::move(preds);
  });

  for (auto& p : fold_preds) res.predictions.insert(res.predictions.end(), p.begin(), p.end());
  res.aggregate = evaluate_run(res.predictions, corpus, Task::Screenplay);
  return res;
}

}  // namespace tpid
