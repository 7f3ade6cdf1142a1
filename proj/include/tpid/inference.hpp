#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "tpid/corpus.hpp"
#include "tpid/error.hpp"
#include "tpid/supervision.hpp"

namespace tpid {

// One row of scene probabilities per TP.
using SceneMatrix = std::array<std::vector<double>, kNumTps>;

namespace detail {

inline int nearest_free(double mu, int n, const std::vector<bool>& taken) {
  const double target = mu * n;
  int best = -1;
  double best_d = 0.0;
  for (int i = 0; i < n; ++i) {
    if (taken[i]) continue;
    const double d = std::abs(i - target);
    if (best < 0 || d < best_d) best = i, best_d = d;
  }
  return best;
}

// Left-to-right assignment with each TP restricted to its window (any index
// when the window is empty), strictly increasing. Every choice is checked for
// suffix feasibility with an earliest-fit pass. Returns nullopt when no
// increasing in-window assignment exists.
inline std::optional<std::array<int, kNumTps>> constrained_assign(const std::vector<double>& probs, const TpStats& s,
                                                                  const std::array<std::vector<int>, kNumTps>& win) {
  const int n = static_cast<int>(probs.size());
  std::array<std::vector<int>, kNumTps> allowed;
  for (int t = 0; t < kNumTps; ++t) {
    if (!win[t].empty()) allowed[t] = win[t];
    else
      for (int i = 0; i < n; ++i) allowed[t].push_back(i);
  }
  auto feasible_after = [&](int t, int cur) {
    for (int u = t + 1; u < kNumTps; ++u) {
      auto it = std::upper_bound(allowed[u].begin(), allowed[u].end(), cur);
      if (it == allowed[u].end()) return false;
      cur = *it;
    }
    return true;
  };
  std::array<int, kNumTps> out{};
  int prev = -1;
  for (int t = 0; t < kNumTps; ++t) {
    int best = -1;
    for (int c : allowed[t]) {
      if (c <= prev || !feasible_after(t, c)) continue;
      if (best < 0) {
        best = c;
        continue;
      }
      if (!win[t].empty()) {
        if (probs[c] > probs[best]) best = c;
      } else if (std::abs(c - s.mu[t] * n) < std::abs(best - s.mu[t] * n)) {
        best = c;
      }
    }
    if (best < 0) return std::nullopt;
    out[t] = best;
    prev = best;
  }
  return out;
}

}  // namespace detail

// Per TP in order: argmax over the TP's mu +- sigma window (lowest index on
// ties), skipping indices already taken; empty or exhausted windows fall back
// to the free index nearest mu. The picks are sorted; if sorting pushed a TP
// out of its window, a constrained increasing assignment replaces them.
inline std::array<int, kNumTps> infer_synopsis_tps(const std::vector<double>& probs, const TpStats& s) {
  const int n = static_cast<int>(probs.size());
  if (n < kNumTps) throw ContractError("infer_synopsis_tps: need at least 5 sentences, got " + std::to_string(n));
  std::array<std::vector<int>, kNumTps> win;
  for (int t = 0; t < kNumTps; ++t) win[t] = window_indices(n, s, t);

  std::vector<bool> taken(n, false);
  std::array<int, kNumTps> pick{};
  for (int t = 0; t < kNumTps; ++t) {
    int best = -1;
    for (int i : win[t])
      if (!taken[i] && (best < 0 || probs[i] > probs[best])) best = i;
    if (best < 0) best = detail::nearest_free(s.mu[t], n, taken);
    taken[best] = true;
    pick[t] = best;
  }
  std::sort(pick.begin(), pick.end());

  bool ok = true;
  for (int t = 0; t < kNumTps; ++t)
    if (!win[t].empty() && !std::binary_search(win[t].begin(), win[t].end(), pick[t])) ok = false;
  if (ok) return pick;
  if (auto repaired = detail::constrained_assign(probs, s, win)) return *repaired;
  return pick;
}

// Three consecutive scenes centred on `peak`, shifted inward at the edges.
inline SceneSet scene_neighborhood(int peak, int m) {
  if (m < 3) {
    SceneSet all;
    for (int i = 0; i < m; ++i) all.push_back(i);
    return all;
  }
  const int lo = std::clamp(peak - 1, 0, m - 3);
  return {lo, lo + 1, lo + 2};
}

// Same, but kept inside the contiguous range [first, last].
inline SceneSet scene_neighborhood_within(int peak, int first, int last) {
  if (last - first + 1 <= 3) {
    SceneSet out;
    for (int i = first; i <= last; ++i) out.push_back(i);
    return out;
  }
  const int lo = std::clamp(peak - 1, first, last - 2);
  return {lo, lo + 1, lo + 2};
}

inline int argmax_lowest(const std::vector<double>& row) {
  if (row.empty()) throw ContractError("argmax: empty row");
  return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
}

inline std::array<SceneSet, kNumTps> infer_scene_tps(const SceneMatrix& probs) {
  const int m = static_cast<int>(probs[0].size());
  std::array<SceneSet, kNumTps> out;
  for (int t = 0; t < kNumTps; ++t) {
    if (static_cast<int>(probs[t].size()) != m) throw ContractError("infer_scene_tps: ragged probability matrix");
    out[t] = scene_neighborhood(m < 3 ? 0 : argmax_lowest(probs[t]), m);
  }
  return out;
}

}  // namespace tpid
