#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpid/corpus.hpp"
#include "tpid/error.hpp"
#include "tpid/inference.hpp"
#include "tpid/rng.hpp"
#include "tpid/supervision.hpp"
#include "tpid/text.hpp"

namespace tpid {

// index_t = min(floor(mu_t * n), n - 1), made strictly increasing by advancing
// past collisions and then pulling back from the end.
inline std::array<int, kNumTps> position_baseline(int n, const TpStats& s) {
  if (n < kNumTps) throw ContractError("position_baseline: need at least 5 positions, got " + std::to_string(n));
  std::array<int, kNumTps> idx{};
  for (int t = 0; t < kNumTps; ++t) {
    idx[t] = std::min(static_cast<int>(std::floor(s.mu[t] * n + kWindowSlack)), n - 1);
    if (t > 0 && idx[t] <= idx[t - 1]) idx[t] = idx[t - 1] + 1;
  }
  idx[kNumTps - 1] = std::min(idx[kNumTps - 1], n - 1);
  for (int t = kNumTps - 2; t >= 0; --t) idx[t] = std::min(idx[t], idx[t + 1] - 1);
  return idx;
}

// Peaks at floor(mu_t * m) with a three-scene neighbourhood each.
inline std::array<SceneSet, kNumTps> position_baseline_scenes(int m, const TpStats& s) {
  if (m < 1) throw ContractError("position_baseline_scenes: empty screenplay");
  std::array<SceneSet, kNumTps> out;
  for (int t = 0; t < kNumTps; ++t)
    out[t] = scene_neighborhood(std::min(static_cast<int>(std::floor(s.mu[t] * m + kWindowSlack)), m - 1), m);
  return out;
}

// Pseudo-posterior for position baselines: a bump at mu, one-hot when sigma = 0.
inline std::vector<double> position_posterior(int n, const TpStats& s, int t) {
  std::vector<double> p(n, 0.0);
  if (s.sigma[t] <= 0.0) {
    p[std::min(static_cast<int>(std::floor(s.mu[t] * n + kWindowSlack)), n - 1)] = 1.0;
    return p;
  }
  for (int i = 0; i < n; ++i) {
    const double z = (static_cast<double>(i) / n - s.mu[t]) / s.sigma[t];
    p[i] = std::exp(-0.5 * z * z);
  }
  return p;
}

inline std::array<int, kNumTps> random_baseline(int n, std::uint64_t seed) {
  if (n < kNumTps) throw ContractError("random_baseline: need at least 5 positions, got " + std::to_string(n));
  Rng rng(seed);
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  // partial Fisher-Yates
  for (int k = 0; k < kNumTps; ++k) {
    const int j = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - k)));
    std::swap(pool[k], pool[j]);
  }
  std::array<int, kNumTps> out{};
  std::copy(pool.begin(), pool.begin() + kNumTps, out.begin());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::array<SceneSet, kNumTps> random_baseline_scenes(int m, std::uint64_t seed) {
  Rng rng(seed);
  std::array<SceneSet, kNumTps> out;
  for (int t = 0; t < kNumTps; ++t) out[t] = scene_neighborhood(static_cast<int>(rng.below(static_cast<std::uint64_t>(m))), m);
  return out;
}

// ---- tf*idf -----------------------------------------------------------------------

using SparseVec = std::vector<std::pair<int, double>>;  // sorted by term id

struct TfidfIndex {
  std::map<std::string, int> vocabulary;
  std::vector<double> idf;
  std::vector<SparseVec> docs;

  // L2-normalized tf*idf vector; tokens outside the vocabulary are dropped.
  SparseVec vectorize(const std::vector<std::string>& tokens) const {
    std::map<int, double> tf;
    for (const auto& tok : tokens)
      if (auto it = vocabulary.find(tok); it != vocabulary.end()) tf[it->second] += 1.0;
    SparseVec v;
    double norm = 0.0;
    for (auto [id, c] : tf) {
      const double w = c * idf[id];
      v.emplace_back(id, w);
      norm += w * w;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (auto& e : v) e.second /= norm;
    }
    return v;
  }
};

inline double sparse_cosine(const SparseVec& a, const SparseVec& b) {
  double d = 0.0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) ++i;
    else if (j->first < i->first) ++j;
    else d += (i++)->second * (j++)->second;
  }
  return std::clamp(d, 0.0, 1.0);
}

// Raw tf, idf = ln((1 + D) / (1 + df)) + 1.
inline TfidfIndex build_tfidf(const std::vector<std::vector<std::string>>& docs) {
  if (docs.empty()) throw ContractError("build_tfidf: empty corpus");
  TfidfIndex ix;
  std::vector<int> df;
  for (const auto& d : docs) {
    std::vector<int> seen;
    for (const auto& tok : d) {
      auto [it, fresh] = ix.vocabulary.emplace(tok, static_cast<int>(ix.vocabulary.size()));
      if (fresh) df.push_back(0);
      seen.push_back(it->second);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (int id : seen) ++df[id];
  }
  const double D = static_cast<double>(docs.size());
  ix.idf.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) ix.idf[i] = std::log((1.0 + D) / (1.0 + df[i])) + 1.0;
  for (const auto& d : docs) ix.docs.push_back(ix.vectorize(d));
  return ix;
}

struct TfidfResult {
  SceneMatrix scores;
  std::array<SceneSet, kNumTps> selected;
};

// score(t, i) = max cosine between TP sentence t and the sentences of scene i,
// over an index built from this screenplay's scene sentences plus the TP
// sentences. With `constrain`, the peak is searched inside the TP's window and
// the neighbourhood kept inside it (an empty window pins the peak to the scene
// nearest mu). Rows that are all zero in the searched
// range fall back to the scene nearest mu * M (theory positions when
// unconstrained).
inline TfidfResult tfidf_scene_scores(const std::array<std::string, kNumTps>& tp_sentences, const std::vector<Scene>& screenplay,
                                      const std::optional<TpStats>& constrain) {
  const int m = static_cast<int>(screenplay.size());
  if (m < 1) throw ContractError("tfidf_scene_scores: empty screenplay");
  std::vector<std::vector<std::string>> docs;
  std::vector<int> scene_of;
  for (int i = 0; i < m; ++i)
    for (const auto& s : screenplay[i].sentences) {
      docs.push_back(text::tfidf_tokens(s));
      scene_of.push_back(i);
    }
  const std::size_t first_tp = docs.size();
  for (const auto& s : tp_sentences) docs.push_back(text::tfidf_tokens(s));
  const auto ix = build_tfidf(docs);

  TfidfResult r;
  const TpStats fallback = constrain ? *constrain : theory_stats();
  for (int t = 0; t < kNumTps; ++t) {
    auto& row = r.scores[t];
    row.assign(m, 0.0);
    const auto& q = ix.docs[first_tp + t];
    for (std::size_t k = 0; k < first_tp; ++k) row[scene_of[k]] = std::max(row[scene_of[k]], sparse_cosine(q, ix.docs[k]));

    int first = 0, last = m - 1;
    bool windowed = false;
    if (constrain) {
      const auto w = window_indices(m, *constrain, t);
      if (w.empty()) first = last = nearest_index(constrain->mu[t], m);
      else first = w.front(), last = w.back(), windowed = true;
    }
    int peak = first;
    for (int i = first; i <= last; ++i)
      if (row[i] > row[peak]) peak = i;
    if (row[peak] <= 0.0) peak = std::clamp(nearest_index(fallback.mu[t], m), first, last);
    r.selected[t] = windowed ? scene_neighborhood_within(peak, first, last) : scene_neighborhood(peak, m);
  }
  return r;
}

}  // namespace tpid
