#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpid/corpus.hpp"
#include "tpid/error.hpp"

namespace tpid {

// Expected TP positions as fractions of document length.
struct TpStats {
  std::array<double, kNumTps> mu{};
  std::array<double, kNumTps> sigma{};
  std::string source = "fitted";

  double lo(int t) const { return mu[t] - sigma[t]; }
  double hi(int t) const { return mu[t] + sigma[t]; }

  bool operator==(const TpStats&) const = default;
};

inline void validate_stats(const TpStats& s) {
  for (int t = 0; t < kNumTps; ++t) {
    if (!std::isfinite(s.mu[t]) || s.mu[t] < 0.0 || s.mu[t] > 1.0)
      throw ContractError("TpStats: mu[" + std::to_string(t) + "] outside [0, 1]");
    if (!std::isfinite(s.sigma[t]) || s.sigma[t] < 0.0)
      throw ContractError("TpStats: sigma[" + std::to_string(t) + "] must be finite and non-negative");
    if (t > 0 && !(s.mu[t] > s.mu[t - 1])) throw ContractError("TpStats: mu must be strictly increasing");
  }
}

inline TpStats theory_stats() {
  TpStats s;
  s.mu = {0.10, 0.25, 0.50, 0.75, 0.945};
  s.sigma = {0, 0, 0, 0, 0};
  s.source = "theory";
  return s;
}

// Mean and population standard deviation of index/N over every synopsis
// annotation of the given movies.
inline TpStats fit_position_stats(const std::vector<const Movie*>& movies) {
  std::array<std::vector<double>, kNumTps> pos;
  for (const Movie* m : movies)
    for (const auto& a : m->synopsis_annotations)
      for (int t = 0; t < kNumTps; ++t) pos[t].push_back(normalize_position(a.tp_indices[t], m->synopsis_length()));
  if (pos[0].empty()) throw InputError("fit_position_stats: no annotated training movies");
  TpStats s;
  for (int t = 0; t < kNumTps; ++t) {
    // sorted summation keeps the result independent of movie order
    auto v = pos[t];
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const bool constant = v.front() == v.back();
    s.mu[t] = constant ? v.front() : mean;
    s.sigma[t] = constant ? 0.0 : std::sqrt(ss / static_cast<double>(v.size()));
  }
  validate_stats(s);
  return s;
}

inline TpStats fit_position_stats(const CorpusSet& corpus, Split split = Split::Train) {
  return fit_position_stats(corpus.in_split(split));
}

inline nlohmann::json stats_to_json(const TpStats& s) {
  return {{"mu", s.mu}, {"sigma", s.sigma}, {"source", s.source}};
}

inline TpStats stats_from_json(const nlohmann::json& j) {
  TpStats s;
  try {
    s.mu = j.at("mu").get<std::array<double, kNumTps>>();
    s.sigma = j.at("sigma").get<std::array<double, kNumTps>>();
    s.source = j.value("source", std::string("fitted"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("stats: ") + e.what());
  }
  if (s.source != "fitted" && s.source != "theory") throw InputError("stats: source must be fitted|theory");
  try {
    validate_stats(s);
  } catch (const ContractError& e) {
    throw InputError(std::string("stats: ") + e.what());
  }
  return s;
}

// ---- windows ------------------------------------------------------------------

inline constexpr double kWindowSlack = 1e-9;

inline bool in_window(int i, int n, const TpStats& s, int t) {
  const double x = static_cast<double>(i) / n;
  return x >= s.lo(t) - kWindowSlack && x <= s.hi(t) + kWindowSlack;
}

// Index minimizing |i - mu*n|, lowest on ties.
inline int nearest_index(double mu, int n) {
  const double target = mu * n;
  int best = 0;
  double best_d = std::abs(target);
  for (int i = std::max(0, static_cast<int>(std::floor(target)) - 1); i < n && i <= target + 1; ++i) {
    const double d = std::abs(i - target);
    if (d < best_d) best = i, best_d = d;
  }
  return best;
}

// Indices of [0, n) inside TP t's window; may be empty.
inline std::vector<int> window_indices(int n, const TpStats& s, int t) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (in_window(i, n, s, t)) out.push_back(i);
  return out;
}

// ---- noisy screenplay labels ----------------------------------------------------

using LabelRows = std::array<std::vector<std::uint8_t>, kNumTps>;

inline LabelRows make_noisy_labels(int M, const TpStats& s) {
  if (M < 1) throw ContractError("make_noisy_labels: need at least one scene");
  LabelRows rows;
  for (int t = 0; t < kNumTps; ++t) {
    rows[t].assign(M, 0);
    bool any = false;
    for (int i = 0; i < M; ++i)
      if (in_window(i, M, s, t)) rows[t][i] = 1, any = true;
    if (!any) rows[t][nearest_index(s.mu[t], M)] = 1;
  }
  return rows;
}

struct ClassWeights {
  double pos = 1.0;
  double neg = 1.0;
};

inline ClassWeights class_weights(std::size_t count_pos, std::size_t count_neg) {
  if (count_pos == 0 || count_neg == 0)
    throw InputError("class_weights: training labels contain a single class (" + std::to_string(count_pos) +
                     " positive, " + std::to_string(count_neg) + " negative)");
  const double total = static_cast<double>(count_pos + count_neg);
  return {total / (2.0 * count_pos), total / (2.0 * count_neg)};
}

inline ClassWeights class_weights(const std::vector<std::uint8_t>& labels) {
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return class_weights(pos, labels.size() - pos);
}

// ---- training instances -------------------------------------------------------------

// One (movie, synopsis annotation) pair; multiply-annotated movies yield
// several instances.
struct TrainingInstance {
  const Movie* movie = nullptr;
  std::size_t annotation = 0;

  const SynopsisAnnotation& synopsis_annotation() const { return movie->synopsis_annotations.at(annotation); }
};

inline std::vector<TrainingInstance> augment_training_set(const std::vector<const Movie*>& movies) {
  std::vector<TrainingInstance> out;
  for (const Movie* m : movies)
    for (std::size_t a = 0; a < m->synopsis_annotations.size(); ++a) out.push_back({m, a});
  return out;
}

inline std::vector<TrainingInstance> augment_training_set(const CorpusSet& corpus, Split split = Split::Train) {
  return augment_training_set(corpus.in_split(split));
}

}  // namespace tpid
