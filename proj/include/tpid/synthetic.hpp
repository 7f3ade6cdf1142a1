#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "tpid/corpus.hpp"
#include "tpid/embedstore.hpp"
#include "tpid/error.hpp"
#include "tpid/rng.hpp"
#include "tpid/supervision.hpp"

namespace tpid {

// Planted-signal corpus: every TP sentence carries the marker "pivot twist reveal"
// and a per-TP token "clue<t>", everything else is filler. TP k of movie i
// sits at round(mu_k * N) + offset with offset alternating between
// -jitter and +jitter across movies, so an even number of training movies
// gives a fitted window of exactly +-jitter around the theory position, and
// the theory position itself is always a filler sentence. The scene holding
// a TP's clue is placed the same way on the screenplay.
struct SyntheticConfig {
  int train_movies = 16;
  int dev_movies = 4;
  int test_movies = 4;
  int synopsis_length = 30;
  int scenes = 30;
  int max_scene_sentences = 3;
  int jitter = 1;
  std::uint64_t seed = 1;
};

inline constexpr std::array<const char*, 48> kFillerWords{
    "harbor", "window", "letter", "garden", "silver", "market", "winter", "engine", "bridge", "candle", "river",  "forest",
    "doctor", "friend", "pocket", "ladder", "castle", "signal", "travel", "motion", "lantern", "meadow", "thunder", "cabinet",
    "ticket", "basket", "circle", "rocket", "shadow", "mirror", "bottle", "pillow", "camera", "planet", "carpet", "violin",
    "tunnel", "pepper", "button", "branch", "island", "saddle", "marble", "helmet", "anchor", "parcel", "copper", "orchard"};
// Several tokens so a single hash-bucket collision cannot erase the marker.
inline constexpr const char* kMarker = "pivot twist reveal";
inline constexpr std::array<const char*, 6> kCastNames{"ada", "boris", "celia", "dmitri", "elena", "farouk"};

namespace detail {

inline std::string filler_sentence(Rng& rng, int words, const std::string& extra = "") {
  std::string s;
  for (int w = 0; w < words; ++w) {
    if (!s.empty()) s += ' ';
    s += kFillerWords[rng.below(kFillerWords.size())];
  }
  if (rng.bernoulli(0.3)) s += std::string(" ") + kCastNames[rng.below(kCastNames.size())];
  if (!extra.empty()) s += " " + extra;
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

// Base positions from the theory row, forced apart by 2 * jitter + 1.
inline std::array<int, kNumTps> planted_positions(int n, int jitter, int parity) {
  const auto th = theory_stats();
  std::array<int, kNumTps> out{};
  for (int t = 0; t < kNumTps; ++t) {
    int base = static_cast<int>(std::lround(th.mu[t] * n));
    base = std::clamp(base, jitter, n - 1 - jitter);
    const int sign = ((parity + t) % 2 == 0) ? -1 : 1;
    out[t] = base + sign * jitter;
  }
  for (int t = 1; t < kNumTps; ++t)
    if (out[t] <= out[t - 1]) throw ContractError("synthetic: length too small for the requested jitter");
  return out;
}

}  // namespace detail

inline CorpusSet make_synthetic_corpus(const SyntheticConfig& cfg) {
  if (cfg.synopsis_length < 10 || cfg.scenes < 10) throw ContractError("synthetic: need at least 10 sentences and 10 scenes");
  if (cfg.train_movies < 1 || cfg.dev_movies < 0 || cfg.test_movies < 0) throw ContractError("synthetic: bad split sizes");
  Rng rng(cfg.seed);
  CorpusSet c;
  const int total = cfg.train_movies + cfg.dev_movies + cfg.test_movies;
  for (int k = 0; k < total; ++k) {
    Movie m;
    m.id = "synthetic-" + std::to_string(k);
    m.title = "Synthetic " + std::to_string(k);
    m.cast.assign(kCastNames.begin(), kCastNames.end());
    const auto tps = detail::planted_positions(cfg.synopsis_length, cfg.jitter, k);
    const auto scene_tps = detail::planted_positions(cfg.scenes, cfg.jitter, k + 1);
    int next = 0;
    for (int i = 0; i < cfg.synopsis_length; ++i) {
      const bool is_tp = next < kNumTps && tps[next] == i;
      const std::string extra = is_tp ? std::string(kMarker) + " clue" + std::to_string(next + 1) : "";
      m.synopsis.push_back(detail::filler_sentence(rng, 5 + static_cast<int>(rng.below(4)), extra));
      if (is_tp) ++next;
    }
    next = 0;
    for (int s = 0; s < cfg.scenes; ++s) {
      Scene sc;
      sc.heading = (rng.bernoulli(0.5) ? "INT. " : "EXT. ") + std::string(kFillerWords[rng.below(kFillerWords.size())]) + " - DAY";
      const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.max_scene_sentences)));
      const bool is_tp = next < kNumTps && scene_tps[next] == s;
      const int clue_at = is_tp ? static_cast<int>(rng.below(static_cast<std::uint64_t>(n))) : -1;
      for (int j = 0; j < n; ++j)
        sc.sentences.push_back(detail::filler_sentence(rng, 4 + static_cast<int>(rng.below(4)),
                                                       j == clue_at ? std::string(kMarker) + " clue" + std::to_string(next + 1) : ""));
      if (is_tp) ++next;
      m.screenplay.push_back(std::move(sc));
    }
    m.synopsis_annotations.push_back({"planted", tps});
    const Split split = k < cfg.train_movies ? Split::Train : k < cfg.train_movies + cfg.dev_movies ? Split::Dev : Split::Test;
    if (split != Split::Train) {
      ScreenplayAnnotation a{"planted", {}};
      for (int t = 0; t < kNumTps; ++t) a.tp_scene_sets[t] = {scene_tps[t]};
      m.screenplay_annotations.push_back(std::move(a));
    }
    c.split_tags[m.id] = split;
    c.movies.push_back(std::move(m));
  }
  return c;
}

// Deterministic stand-in for pretrained entity vectors: every entity token
// of the corpus gets hash_embed(token) of the requested dim.
inline WordVectorTable hash_word_table(const CorpusSet& c, std::size_t dim, std::uint64_t seed) {
  WordVectorTable t(dim);
  auto add = [&](const std::string& sentence) {
    for (const auto& tok : text::entity_tokens(sentence))
      if (!t.entries().count(tok)) t.put(tok, hash_embed(tok, dim, seed));
  };
  for (const auto& m : c.movies) {
    for (const auto& s : m.synopsis) add(s);
    for (const auto& sc : m.screenplay)
      for (const auto& s : sc.sentences) add(s);
  }
  return t;
}

}  // namespace tpid
