#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpid/corpus.hpp"
#include "tpid/embedstore.hpp"
#include "tpid/error.hpp"
#include "tpid/evaluate.hpp"
#include "tpid/inference.hpp"
#include "tpid/nn/autodiff.hpp"
#include "tpid/nn/layers.hpp"
#include "tpid/nn/tensor.hpp"
#include "tpid/rng.hpp"
#include "tpid/supervision.hpp"
#include "tpid/text.hpp"

namespace tpid {

// ---- variants and configs -----------------------------------------------------------

enum class SynopsisVariant { Baseline, Cam, Tam, TamViews, TamEntities, TamViewsEntities };
enum class ScreenplayVariant { Cam, CamEntities, Tam, TamEntities };

// Second scalar of the interaction layer: the ratio as written (coincides
// with the cosine), or the Euclidean distance between the two vectors.
enum class SimilarityMode { Literal, Euclidean };

inline constexpr std::array<const char*, 6> kSynopsisVariantNames{"baseline", "cam", "tam", "tam+views", "tam+entities",
                                                                  "tam+views+entities"};
inline constexpr std::array<const char*, 4> kScreenplayVariantNames{"cam", "cam+entities", "tam", "tam+entities"};

inline std::string variant_name(SynopsisVariant v) { return kSynopsisVariantNames[static_cast<int>(v)]; }
inline std::string variant_name(ScreenplayVariant v) { return kScreenplayVariantNames[static_cast<int>(v)]; }

inline SynopsisVariant parse_synopsis_variant(std::string_view s) {
  for (std::size_t i = 0; i < kSynopsisVariantNames.size(); ++i)
    if (s == kSynopsisVariantNames[i]) return static_cast<SynopsisVariant>(i);
  throw InputError("unknown synopsis variant '" + std::string(s) + "'");
}

inline ScreenplayVariant parse_screenplay_variant(std::string_view s) {
  for (std::size_t i = 0; i < kScreenplayVariantNames.size(); ++i)
    if (s == kScreenplayVariantNames[i]) return static_cast<ScreenplayVariant>(i);
  throw InputError("unknown screenplay variant '" + std::string(s) + "'");
}

inline bool uses_entities(SynopsisVariant v) { return v == SynopsisVariant::TamEntities || v == SynopsisVariant::TamViewsEntities; }
inline bool uses_entities(ScreenplayVariant v) { return v == ScreenplayVariant::CamEntities || v == ScreenplayVariant::TamEntities; }
inline bool uses_views(SynopsisVariant v) { return v == SynopsisVariant::TamViews || v == SynopsisVariant::TamViewsEntities; }
inline bool uses_context(SynopsisVariant v) { return v != SynopsisVariant::Baseline && v != SynopsisVariant::Cam; }
inline bool uses_context(ScreenplayVariant v) { return v == ScreenplayVariant::Tam || v == ScreenplayVariant::TamEntities; }

struct SynopsisModelConfig {
  SynopsisVariant variant = SynopsisVariant::Tam;
  std::size_t input_dim = 0;
  std::size_t hidden = 32;
  int window = 2;
  std::size_t entity_dim = 300;
  std::size_t entity_hidden = 32;
  double dropout = 0.2;
  SimilarityMode similarity = SimilarityMode::Literal;

  bool operator==(const SynopsisModelConfig&) const = default;
};

struct ScreenplayModelConfig {
  ScreenplayVariant variant = ScreenplayVariant::Tam;
  std::size_t input_dim = 0;
  std::size_t hidden = 64;
  double window_fraction = 0.20;
  std::size_t entity_dim = 300;
  std::size_t entity_hidden = 64;
  double dropout = 0.2;
  SimilarityMode similarity = SimilarityMode::Literal;

  bool operator==(const ScreenplayModelConfig&) const = default;
};

inline void validate(const SynopsisModelConfig& c) {
  if (c.input_dim == 0 || c.hidden == 0) throw ContractError("synopsis config: dims must be positive");
  if (c.window < 1) throw ContractError("synopsis config: window must be >= 1");
  if (uses_entities(c.variant) && (c.entity_dim == 0 || c.entity_hidden == 0))
    throw ContractError("synopsis config: entity dims must be positive");
}

inline void validate(const ScreenplayModelConfig& c) {
  if (c.input_dim == 0 || c.hidden == 0) throw ContractError("screenplay config: dims must be positive");
  if (!(c.window_fraction > 0.0 && c.window_fraction < 1.0))
    throw ContractError("screenplay config: window fraction must lie in (0, 1)");
}

// Context window length for a screenplay of m scenes.
inline int screenplay_window(double fraction, int m) { return std::max(1, static_cast<int>(std::lround(fraction * m))); }

// ---- inputs ---------------------------------------------------------------------------------

// A sentence as seen by the models: its generic vector and, for entity
// variants, the word vectors of its entity tokens.
struct SentenceFeatures {
  std::vector<float> x;
  std::vector<std::vector<float>> words;
};

struct ScreenplayInput {
  std::vector<std::vector<SentenceFeatures>> scenes;
  std::vector<SentenceFeatures> synopsis;
};

inline SentenceFeatures sentence_features(const std::string& text, const std::vector<float>& vec, const WordVectorTable* table) {
  SentenceFeatures f{vec, {}};
  if (table)
    for (const auto& tok : text::entity_tokens(text)) f.words.push_back(table->lookup(tok));
  return f;
}

namespace detail {

inline void require_coverage(const Movie& m, const EmbeddingStore& store, bool synopsis, bool screenplay) {
  auto missing = missing_keys(m, store, synopsis, screenplay);
  if (missing.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
  if (missing.size() > 10) list += ", ... (" + std::to_string(missing.size()) + " total)";
  throw InputError("embeddings missing for movie '" + m.id + "': " + list);
}

inline void require_dim(const EmbeddingStore& store, std::size_t dim) {
  if (store.dim() != dim)
    throw InputError("embedding store dim " + std::to_string(store.dim()) + " does not match model input dim " +
                     std::to_string(dim));
}

}  // namespace detail

inline std::vector<SentenceFeatures> synopsis_features(const Movie& m, const EmbeddingStore& store, const WordVectorTable* table) {
  detail::require_coverage(m, store, true, false);
  std::vector<SentenceFeatures> out;
  for (int i = 0; i < m.synopsis_length(); ++i)
    out.push_back(sentence_features(m.synopsis[i], store.get(EmbeddingKey::synopsis(m.id, i)), table));
  return out;
}

inline ScreenplayInput screenplay_features(const Movie& m, const EmbeddingStore& store, const WordVectorTable* table) {
  detail::require_coverage(m, store, true, true);
  ScreenplayInput in;
  in.synopsis = synopsis_features(m, store, table);
  for (int s = 0; s < m.screenplay_length(); ++s) {
    std::vector<SentenceFeatures> scene;
    for (int j = 0; j < static_cast<int>(m.screenplay[s].sentences.size()); ++j)
      scene.push_back(sentence_features(m.screenplay[s].sentences[j], store.get(EmbeddingKey::scene_sentence(m.id, s, j)), table));
    in.scenes.push_back(std::move(scene));
  }
  return in;
}

// ---- interaction and context windows (value level) -------------------------------------

inline constexpr double kSimilarityEps = 1e-8;

struct InteractionFeatures {
  std::vector<float> b;
  double c = 0.0;
  double u = 0.0;
  std::vector<float> f;  // [cp ; ctx ; b ; c ; u]
};

inline InteractionFeatures interaction(std::span<const float> cp, std::span<const float> ctx,
                                       SimilarityMode mode = SimilarityMode::Literal) {
  if (cp.size() != ctx.size()) throw ContractError("interaction: dim mismatch");
  InteractionFeatures r;
  double d = 0, na = 0, nb = 0, dist = 0;
  for (std::size_t i = 0; i < cp.size(); ++i) {
    r.b.push_back(cp[i] * ctx[i]);
    d += double(cp[i]) * ctx[i];
    na += double(cp[i]) * cp[i];
    nb += double(ctx[i]) * ctx[i];
    dist += (double(cp[i]) - ctx[i]) * (double(cp[i]) - ctx[i]);
  }
  r.c = d / std::max(std::sqrt(na) * std::sqrt(nb), kSimilarityEps);
  r.u = mode == SimilarityMode::Literal ? r.c : std::sqrt(dist);
  r.f.assign(cp.begin(), cp.end());
  r.f.insert(r.f.end(), ctx.begin(), ctx.end());
  r.f.insert(r.f.end(), r.b.begin(), r.b.end());
  r.f.push_back(static_cast<float>(r.c));
  r.f.push_back(static_cast<float>(r.u));
  return r;
}

// Means of the l representations left and right of i; empty windows are zero.
inline std::pair<std::vector<float>, std::vector<float>> context_windows(const std::vector<std::vector<float>>& reps, int i, int l) {
  if (reps.empty()) throw ContractError("context_windows: empty sequence");
  const int n = static_cast<int>(reps.size());
  const std::size_t d = reps.front().size();
  auto avg = [&](int from, int to) {
    std::vector<float> out(d, 0.0f);
    if (from > to) return out;
    std::vector<double> acc(d, 0.0);
    for (int k = from; k <= to; ++k)
      for (std::size_t j = 0; j < d; ++j) acc[j] += reps[k][j];
    for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(acc[j] / (to - from + 1));
    return out;
  };
  return {avg(std::max(0, i - l), i - 1), avg(i + 1, std::min(n - 1, i + l))};
}

// ---- tape-level building blocks ------------------------------------------------------------

template <class T>
nn::Var<T> interaction_var(nn::Var<T> cp, nn::Var<T> ctx, SimilarityMode mode) {
  auto b = nn::mul(cp, ctx);
  auto denom = nn::max_floor(nn::mul(nn::norm2(cp), nn::norm2(ctx)), static_cast<T>(kSimilarityEps));
  auto c = nn::div(nn::dot(cp, ctx), denom);
  auto u = mode == SimilarityMode::Literal ? c : nn::norm2(nn::sub(cp, ctx));
  return nn::concat<T>({cp, ctx, b, c, u});
}

template <class T>
std::pair<nn::Var<T>, nn::Var<T>> context_windows_var(nn::Tape<T>& tape, const std::vector<nn::Var<T>>& reps, int i, int l) {
  const int n = static_cast<int>(reps.size());
  auto avg = [&](int from, int to) {
    if (from > to) return tape.zeros(reps.front().size());
    std::vector<nn::Var<T>> items(reps.begin() + from, reps.begin() + to + 1);
    return nn::mean(items);
  };
  return {avg(std::max(0, i - l), i - 1), avg(i + 1, std::min(n - 1, i + l))};
}

struct EntityEncoderParams {
  nn::BiLstmParams lstm;
  nn::AttentionParams att;

  EntityEncoderParams() = default;
  EntityEncoderParams(std::size_t word_dim, std::size_t hidden) : lstm(word_dim, hidden), att(2 * hidden) {}

  std::size_t output_dim() const { return lstm.output_dim(); }
  void init(Rng& rng) {
    lstm.init(rng);
    att.init(rng);
  }
  void collect(nn::ParamList& out, const std::string& prefix) {
    lstm.collect(out, prefix + ".lstm");
    att.collect(out, prefix + ".att");
  }
};

// Word vectors are fixed inputs; sentences without entity tokens read one zero word.
template <class T>
nn::Var<T> encode_entities(nn::Tape<T>& tape, EntityEncoderParams& p, const std::vector<std::vector<float>>& words) {
  std::vector<nn::Var<T>> seq;
  for (const auto& w : words) seq.push_back(tape.constant(std::span<const float>(w)));
  if (seq.empty()) seq.push_back(tape.zeros(p.lstm.input_dim()));
  return nn::attention_pool(tape, p.att, nn::bilstm(tape, p.lstm, seq)).output;
}

template <class T>
std::vector<nn::Var<T>> encoder_inputs(nn::Tape<T>& tape, EntityEncoderParams* ent, const std::vector<SentenceFeatures>& sents,
                                       std::size_t input_dim) {
  std::vector<nn::Var<T>> out;
  out.reserve(sents.size());
  for (const auto& s : sents) {
    if (s.x.size() != input_dim)
      throw ContractError("model input: sentence vector has dim " + std::to_string(s.x.size()) + ", expected " +
                          std::to_string(input_dim));
    auto x = tape.constant(std::span<const float>(s.x));
    out.push_back(ent ? nn::concat<T>({x, encode_entities(tape, *ent, s.words)}) : x);
  }
  return out;
}

// ---- synopsis model -----------------------------------------------------------------------

struct SynopsisModel {
  SynopsisModelConfig cfg;
  std::optional<EntityEncoderParams> entity;
  std::vector<nn::BiLstmParams> encoders;  // none for baseline, five for TP views
  nn::DenseParams classifier;

  SynopsisModel() = default;
  explicit SynopsisModel(SynopsisModelConfig c) : cfg(c) {
    validate(cfg);
    if (uses_entities(cfg.variant)) entity.emplace(cfg.entity_dim, cfg.entity_hidden);
    const std::size_t views = cfg.variant == SynopsisVariant::Baseline ? 0 : uses_views(cfg.variant) ? kNumTps : 1;
    for (std::size_t v = 0; v < views; ++v) encoders.emplace_back(encoder_input_dim(), cfg.hidden);
    classifier = nn::DenseParams(feature_dim());
  }

  std::size_t encoder_input_dim() const { return cfg.input_dim + (entity ? entity->output_dim() : 0); }

  std::size_t feature_dim() const {
    if (cfg.variant == SynopsisVariant::Baseline) return encoder_input_dim();
    const std::size_t d = 2 * cfg.hidden;
    const std::size_t per_view = uses_context(cfg.variant) ? 2 * (3 * d + 2) + d : d;
    return per_view * (uses_views(cfg.variant) ? kNumTps : 1);
  }

  void init(Rng& rng) {
    if (entity) entity->init(rng);
    for (auto& e : encoders) e.init(rng);
    classifier.init(rng);
  }

  nn::ParamList params() {
    nn::ParamList out;
    if (entity) entity->collect(out, "entity");
    for (std::size_t v = 0; v < encoders.size(); ++v) encoders[v].collect(out, "encoder" + std::to_string(v));
    classifier.collect(out, "classifier");
    return out;
  }
};

// Per-sentence probabilities. `rng` drives dropout and is only read when training.
template <class T>
std::vector<nn::Var<T>> synopsis_probabilities(nn::Tape<T>& tape, SynopsisModel& m, const std::vector<SentenceFeatures>& input,
                                               Rng* rng = nullptr, bool training = false) {
  if (input.empty()) throw ContractError("forward_synopsis: empty synopsis");
  if (uses_entities(m.cfg.variant) && !m.entity) throw ContractError("forward_synopsis: entity encoder missing");
  const std::size_t n = input.size();
  auto xs = encoder_inputs(tape, m.entity ? &*m.entity : nullptr, input, m.cfg.input_dim);
  std::vector<std::vector<nn::Var<T>>> parts(n);
  if (m.encoders.empty()) {
    for (std::size_t i = 0; i < n; ++i) parts[i].push_back(xs[i]);
  }
  for (auto& enc : m.encoders) {
    auto cp = nn::bilstm(tape, enc, xs);
    for (std::size_t i = 0; i < n; ++i) {
      if (!uses_context(m.cfg.variant)) {
        parts[i].push_back(cp[i]);
        continue;
      }
      auto [lc, rc] = context_windows_var(tape, cp, static_cast<int>(i), m.cfg.window);
      parts[i].push_back(interaction_var(cp[i], lc, m.cfg.similarity));
      parts[i].push_back(interaction_var(cp[i], rc, m.cfg.similarity));
      parts[i].push_back(cp[i]);
    }
  }
  std::vector<nn::Var<T>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto y = parts[i].size() == 1 ? parts[i][0] : nn::concat(parts[i]);
    if (training && rng) y = nn::dropout(y, m.cfg.dropout, *rng, true);
    out.push_back(nn::dense_sigmoid(tape, m.classifier, y));
  }
  return out;
}

inline std::vector<double> forward_synopsis(SynopsisModel& m, const std::vector<SentenceFeatures>& input) {
  nn::Tape<float> tape;
  auto ps = synopsis_probabilities(tape, m, input);
  std::vector<double> out;
  for (auto& p : ps) out.push_back(p.scalar());
  return out;
}

// ---- screenplay model -----------------------------------------------------------------------

struct ScreenplayModel {
  ScreenplayModelConfig cfg;
  std::optional<EntityEncoderParams> entity;
  nn::BiLstmParams scene_encoder;
  nn::AttentionParams scene_attention;
  nn::BiLstmParams screenplay_encoder;
  nn::BiLstmParams synopsis_encoder;
  nn::LinearParams projection;  // z_i -> TP dimension
  nn::DenseParams classifier;

  ScreenplayModel() = default;
  explicit ScreenplayModel(ScreenplayModelConfig c) : cfg(c) {
    validate(cfg);
    if (uses_entities(cfg.variant)) entity.emplace(cfg.entity_dim, cfg.entity_hidden);
    const std::size_t in = cfg.input_dim + (entity ? entity->output_dim() : 0);
    const std::size_t d = 2 * cfg.hidden;
    scene_encoder = nn::BiLstmParams(in, cfg.hidden);
    scene_attention = nn::AttentionParams(d);
    screenplay_encoder = nn::BiLstmParams(d, cfg.hidden);
    synopsis_encoder = nn::BiLstmParams(in, cfg.hidden);
    projection = nn::LinearParams(scene_dim(), d);
    classifier = nn::DenseParams(feature_dim());
  }

  std::size_t tp_dim() const { return 2 * cfg.hidden; }
  std::size_t scene_dim() const { return (uses_context(cfg.variant) ? 3 : 1) * 2 * cfg.hidden; }
  std::size_t feature_dim() const { return scene_dim() + 2 * tp_dim() + 2; }

  void init(Rng& rng) {
    if (entity) entity->init(rng);
    scene_encoder.init(rng);
    scene_attention.init(rng);
    screenplay_encoder.init(rng);
    synopsis_encoder.init(rng);
    projection.init(rng);
    classifier.init(rng);
  }

  nn::ParamList params() {
    nn::ParamList out;
    if (entity) entity->collect(out, "entity");
    scene_encoder.collect(out, "scene_encoder");
    scene_attention.collect(out, "scene_attention");
    screenplay_encoder.collect(out, "screenplay_encoder");
    synopsis_encoder.collect(out, "synopsis_encoder");
    projection.collect(out, "projection");
    classifier.collect(out, "classifier");
    return out;
  }
};

// BiLSTM over the scene's sentences, attention-pooled.
template <class T>
nn::Var<T> scene_encode(nn::Tape<T>& tape, ScreenplayModel& m, const std::vector<SentenceFeatures>& scene) {
  if (scene.empty()) throw ContractError("scene_encode: empty scene");
  auto xs = encoder_inputs(tape, m.entity ? &*m.entity : nullptr, scene, m.cfg.input_dim);
  return nn::attention_pool(tape, m.scene_attention, nn::bilstm(tape, m.scene_encoder, xs)).output;
}

// TP vectors are the synopsis encoder's states at the TP sentence indices.
template <class T>
std::array<std::vector<nn::Var<T>>, kNumTps> screenplay_probabilities(nn::Tape<T>& tape, ScreenplayModel& m,
                                                                      const ScreenplayInput& input,
                                                                      const std::array<int, kNumTps>& tp_indices,
                                                                      Rng* rng = nullptr, bool training = false) {
  if (input.scenes.empty()) throw ContractError("forward_screenplay: no scenes");
  const int n_syn = static_cast<int>(input.synopsis.size());
  for (int t = 0; t < kNumTps; ++t)
    if (tp_indices[t] < 0 || tp_indices[t] >= n_syn)
      throw ContractError("forward_screenplay: TP index " + std::to_string(tp_indices[t]) + " out of range");
  const int M = static_cast<int>(input.scenes.size());

  std::vector<nn::Var<T>> s;
  s.reserve(M);
  for (const auto& scene : input.scenes) s.push_back(scene_encode(tape, m, scene));
  auto sc = nn::bilstm(tape, m.screenplay_encoder, s);

  std::vector<nn::Var<T>> z(M), zp(M), znorm(M);
  const int l = screenplay_window(m.cfg.window_fraction, M);
  for (int i = 0; i < M; ++i) {
    if (uses_context(m.cfg.variant)) {
      auto [lc, rc] = context_windows_var(tape, sc, i, l);
      z[i] = nn::concat<T>({lc, sc[i], rc});
    } else {
      z[i] = sc[i];
    }
    zp[i] = nn::linear(tape, m.projection, z[i]);
    znorm[i] = nn::norm2(zp[i]);
  }

  auto syn = nn::bilstm(tape, m.synopsis_encoder, encoder_inputs(tape, m.entity ? &*m.entity : nullptr, input.synopsis, m.cfg.input_dim));
  std::array<std::vector<nn::Var<T>>, kNumTps> out;
  for (int t = 0; t < kNumTps; ++t) {
    auto tp = syn[tp_indices[t]];
    auto tp_norm = nn::norm2(tp);
    out[t].reserve(M);
    for (int i = 0; i < M; ++i) {
      auto b = nn::mul(zp[i], tp);
      auto c = nn::div(nn::dot(zp[i], tp), nn::max_floor(nn::mul(znorm[i], tp_norm), static_cast<T>(kSimilarityEps)));
      auto u = m.cfg.similarity == SimilarityMode::Literal ? c : nn::norm2(nn::sub(zp[i], tp));
      auto f = nn::concat<T>({z[i], tp, b, c, u});
      if (training && rng) f = nn::dropout(f, m.cfg.dropout, *rng, true);
      out[t].push_back(nn::dense_sigmoid(tape, m.classifier, f));
    }
  }
  return out;
}

inline SceneMatrix forward_screenplay(ScreenplayModel& m, const ScreenplayInput& input, const std::array<int, kNumTps>& tp_indices) {
  nn::Tape<float> tape;
  auto ps = screenplay_probabilities(tape, m, input, tp_indices);
  SceneMatrix out;
  for (int t = 0; t < kNumTps; ++t)
    for (auto& p : ps[t]) out[t].push_back(p.scalar());
  return out;
}

// ---- losses -------------------------------------------------------------------------------------

// Mean class-weighted BCE over sentences; labels are 0/1 per sentence.
template <class T>
nn::Var<T> synopsis_loss(nn::Tape<T>& tape, SynopsisModel& m, const std::vector<SentenceFeatures>& input,
                         const std::vector<std::uint8_t>& labels, ClassWeights w, Rng* rng = nullptr, bool training = false) {
  if (labels.size() != input.size()) throw ContractError("synopsis_loss: label count does not match sentence count");
  auto ps = synopsis_probabilities(tape, m, input, rng, training);
  std::vector<nn::Var<T>> terms;
  for (std::size_t i = 0; i < ps.size(); ++i) terms.push_back(nn::weighted_bce(ps[i], labels[i], w.pos, w.neg));
  return nn::scale(nn::add_n(terms), static_cast<T>(1.0 / static_cast<double>(terms.size())));
}

// Mean class-weighted BCE over all (TP, scene) pairs.
template <class T>
nn::Var<T> screenplay_loss(nn::Tape<T>& tape, ScreenplayModel& m, const ScreenplayInput& input, const std::array<int, kNumTps>& tps,
                           const LabelRows& labels, ClassWeights w, Rng* rng = nullptr, bool training = false) {
  auto ps = screenplay_probabilities(tape, m, input, tps, rng, training);
  std::vector<nn::Var<T>> terms;
  for (int t = 0; t < kNumTps; ++t) {
    if (labels[t].size() != ps[t].size()) throw ContractError("screenplay_loss: label row does not match scene count");
    for (std::size_t i = 0; i < ps[t].size(); ++i) terms.push_back(nn::weighted_bce(ps[t][i], labels[t][i], w.pos, w.neg));
  }
  return nn::scale(nn::add_n(terms), static_cast<T>(1.0 / static_cast<double>(terms.size())));
}

template <class Variant>
void require_entity_table(Variant v, const WordVectorTable* table, std::size_t entity_dim) {
  if (!uses_entities(v)) return;
  if (!table) throw InputError("variant '" + variant_name(v) + "' requires an entity word-vector table");
  if (table->dim() != entity_dim)
    throw InputError("entity table dim " + std::to_string(table->dim()) + " does not match model entity dim " +
                     std::to_string(entity_dim));
}

// ---- posterior traces -------------------------------------------------------------------------

struct PosteriorTrace {
  std::string movie;
  Task kind = Task::Synopsis;
  std::vector<double> sentence_probs;  // synopsis: length N
  SceneMatrix scene_probs;             // screenplay: 5 x M
  std::array<int, kNumTps> selected_sentences{};
  std::array<SceneSet, kNumTps> selected_scenes;

  Prediction prediction() const { return {movie, selected_sentences, selected_scenes}; }
};

inline std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

// Synopsis: one block of N rows per TP (tp,index,probability,selected), the
// probability column repeating the shared sentence posterior. Screenplay:
// one block of M rows per TP. With `gold`, a fifth column marks gold
// positions and is left empty when the movie has no annotation.
inline std::string trace_csv(const PosteriorTrace& tr, bool with_gold = false, const std::optional<std::array<SceneSet, kNumTps>>& gold = std::nullopt) {
  std::string out = tr.kind == Task::Synopsis ? "tp,index,probability,selected" : "tp,scene,probability,selected";
  if (with_gold) out += ",gold";
  out += "\n";
  for (int t = 0; t < kNumTps; ++t) {
    const auto& row = tr.kind == Task::Synopsis ? tr.sentence_probs : tr.scene_probs[t];
    for (int i = 0; i < static_cast<int>(row.size()); ++i) {
      const bool sel = tr.kind == Task::Synopsis ? tr.selected_sentences[t] == i
                                                 : std::binary_search(tr.selected_scenes[t].begin(), tr.selected_scenes[t].end(), i);
      out += std::to_string(t + 1) + "," + std::to_string(i) + "," + format_prob(row[i]) + "," + (sel ? "1" : "0");
      if (with_gold) {
        out += ",";
        if (gold) out += std::binary_search((*gold)[t].begin(), (*gold)[t].end(), i) ? "1" : "0";
      }
      out += "\n";
    }
  }
  return out;
}

inline PosteriorTrace predict_synopsis(SynopsisModel& m, const Movie& movie, const std::vector<SentenceFeatures>& input, const TpStats& stats) {
  PosteriorTrace tr;
  tr.movie = movie.id;
  tr.kind = Task::Synopsis;
  tr.sentence_probs = forward_synopsis(m, input);
  tr.selected_sentences = infer_synopsis_tps(tr.sentence_probs, stats);
  return tr;
}

inline PosteriorTrace predict_screenplay(ScreenplayModel& m, const Movie& movie, const ScreenplayInput& input,
                                         const std::array<int, kNumTps>& tp_indices) {
  PosteriorTrace tr;
  tr.movie = movie.id;
  tr.kind = Task::Screenplay;
  tr.scene_probs = forward_screenplay(m, input, tp_indices);
  tr.selected_scenes = infer_scene_tps(tr.scene_probs);
  tr.selected_sentences = tp_indices;
  return tr;
}

// Predicted synopsis TPs feed the screenplay model. With `gold_tps`, the
// synopsis stage is bypassed.
inline PosteriorTrace end_to_end(SynopsisModel& syn, ScreenplayModel& scr, const Movie& movie, const EmbeddingStore& store,
                                 const WordVectorTable* entities, const TpStats& stats,
                                 const std::optional<std::array<int, kNumTps>>& gold_tps = std::nullopt) {
  detail::require_dim(store, syn.cfg.input_dim);
  detail::require_dim(store, scr.cfg.input_dim);
  require_entity_table(syn.cfg.variant, entities, syn.cfg.entity_dim);
  require_entity_table(scr.cfg.variant, entities, scr.cfg.entity_dim);
  auto input = screenplay_features(movie, store, entities);
  std::array<int, kNumTps> tps{};
  if (gold_tps) tps = *gold_tps;
  else tps = infer_synopsis_tps(forward_synopsis(syn, input.synopsis), stats);
  return predict_screenplay(scr, movie, input, tps);
}

// ---- config json ---------------------------------------------------------------------------------

inline nlohmann::json config_to_json(const SynopsisModelConfig& c) {
  return {{"variant", variant_name(c.variant)}, {"input_dim", c.input_dim},     {"hidden", c.hidden},
          {"window", c.window},                 {"entity_dim", c.entity_dim},   {"entity_hidden", c.entity_hidden},
          {"dropout", c.dropout},               {"similarity", c.similarity == SimilarityMode::Literal ? "literal" : "euclidean"}};
}

inline nlohmann::json config_to_json(const ScreenplayModelConfig& c) {
  return {{"variant", variant_name(c.variant)}, {"input_dim", c.input_dim},     {"hidden", c.hidden},
          {"window_fraction", c.window_fraction}, {"entity_dim", c.entity_dim}, {"entity_hidden", c.entity_hidden},
          {"dropout", c.dropout},               {"similarity", c.similarity == SimilarityMode::Literal ? "literal" : "euclidean"}};
}

inline SimilarityMode parse_similarity(std::string_view s) {
  if (s == "literal") return SimilarityMode::Literal;
  if (s == "euclidean") return SimilarityMode::Euclidean;
  throw InputError("unknown similarity mode '" + std::string(s) + "'");
}

inline SynopsisModelConfig synopsis_config_from_json(const nlohmann::json& j) {
  SynopsisModelConfig c;
  try {
    c.variant = parse_synopsis_variant(j.at("variant").get<std::string>());
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.window = j.at("window").get<int>();
    c.entity_dim = j.at("entity_dim").get<std::size_t>();
    c.entity_hidden = j.at("entity_hidden").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    c.similarity = parse_similarity(j.at("similarity").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("synopsis model config: ") + e.what());
  }
  return c;
}

inline ScreenplayModelConfig screenplay_config_from_json(const nlohmann::json& j) {
  ScreenplayModelConfig c;
  try {
    c.variant = parse_screenplay_variant(j.at("variant").get<std::string>());
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.window_fraction = j.at("window_fraction").get<double>();
    c.entity_dim = j.at("entity_dim").get<std::size_t>();
    c.entity_hidden = j.at("entity_hidden").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    c.similarity = parse_similarity(j.at("similarity").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("screenplay model config: ") + e.what());
  }
  return c;
}

}  // namespace tpid
