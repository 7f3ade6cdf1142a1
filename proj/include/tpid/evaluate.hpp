#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpid/corpus.hpp"
#include "tpid/error.hpp"
#include "tpid/rng.hpp"

namespace tpid {

enum class Task { Synopsis, Screenplay };

inline const char* task_name(Task t) { return t == Task::Synopsis ? "synopsis" : "screenplay"; }

inline Task parse_task(std::string_view s) {
  if (s == "synopsis") return Task::Synopsis;
  if (s == "screenplay") return Task::Screenplay;
  throw InputError("unknown task '" + std::string(s) + "' (expected synopsis|screenplay)");
}

// ---- per-instance metrics ----------------------------------------------------------

inline double d_synopsis(int p, int tp, int n) {
  if (n <= 0 || p < 0 || tp < 0 || p >= n || tp >= n)
    throw ContractError("d_synopsis: indices " + std::to_string(p) + ", " + std::to_string(tp) + " out of range [0, " +
                        std::to_string(n) + ")");
  return std::abs(p - tp) / static_cast<double>(n);
}

inline double ta_synopsis(std::span<const int> pred, std::span<const int> gold) {
  if (pred.size() != kNumTps || gold.size() != kNumTps)
    throw ContractError("ta_synopsis: expected 5 indices, got " + std::to_string(pred.size()) + " and " +
                        std::to_string(gold.size()));
  int hits = 0;
  for (int t = 0; t < kNumTps; ++t) hits += pred[t] == gold[t];
  return hits / static_cast<double>(kNumTps);
}

namespace detail {

inline void check_scene_sets(std::span<const SceneSet> pred, std::span<const SceneSet> gold, const char* op) {
  if (pred.size() != kNumTps || gold.size() != kNumTps)
    throw ContractError(std::string(op) + ": expected 5 scene sets per side");
  for (int t = 0; t < kNumTps; ++t)
    if (pred[t].empty() || gold[t].empty()) throw ContractError(std::string(op) + ": empty scene set for TP " + std::to_string(t + 1));
}

// Sets are sorted and unique.
inline std::size_t intersection_size(const SceneSet& a, const SceneSet& b) {
  std::size_t n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else ++n, ++i, ++j;
  }
  return n;
}

inline int min_distance(const SceneSet& a, const SceneSet& b) {
  int best = std::abs(a.front() - b.front());
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    best = std::min(best, std::abs(*i - *j));
    if (*i < *j) ++i;
    else ++j;
  }
  return best;
}

}  // namespace detail

// Mean over TPs of the Jaccard overlap.
inline double ta_scenes(std::span<const SceneSet> pred, std::span<const SceneSet> gold) {
  detail::check_scene_sets(pred, gold, "ta_scenes");
  double s = 0.0;
  for (int t = 0; t < kNumTps; ++t) {
    const auto inter = detail::intersection_size(pred[t], gold[t]);
    s += static_cast<double>(inter) / static_cast<double>(pred[t].size() + gold[t].size() - inter);
  }
  return s / kNumTps;
}

inline double pa_scenes(std::span<const SceneSet> pred, std::span<const SceneSet> gold) {
  detail::check_scene_sets(pred, gold, "pa_scenes");
  int hits = 0;
  for (int t = 0; t < kNumTps; ++t) hits += detail::intersection_size(pred[t], gold[t]) > 0;
  return hits / static_cast<double>(kNumTps);
}

inline double d_scenes_tp(const SceneSet& pred, const SceneSet& gold, int m) {
  return detail::min_distance(pred, gold) / static_cast<double>(m);
}

inline double d_scenes(std::span<const SceneSet> pred, std::span<const SceneSet> gold, int m) {
  detail::check_scene_sets(pred, gold, "d_scenes");
  if (m <= 0) throw ContractError("d_scenes: scene count must be positive");
  double s = 0.0;
  for (int t = 0; t < kNumTps; ++t) {
    for (int x : pred[t])
      if (x < 0 || x >= m) throw ContractError("d_scenes: predicted scene " + std::to_string(x) + " out of range");
    for (int x : gold[t])
      if (x < 0 || x >= m) throw ContractError("d_scenes: gold scene " + std::to_string(x) + " out of range");
    s += d_scenes_tp(pred[t], gold[t], m);
  }
  return s / kNumTps;
}

// ---- run-level aggregation ----------------------------------------------------------

struct Prediction {
  std::string movie;
  std::array<int, kNumTps> tp_indices{};    // synopsis task
  std::array<SceneSet, kNumTps> tp_scenes;  // screenplay task

  bool operator==(const Prediction&) const = default;
};

// Percentages. pa is only meaningful for the screenplay task.
struct MetricReport {
  Task task = Task::Synopsis;
  double ta = 0.0;
  double pa = 0.0;
  double d_mean = 0.0;
  double d_std = 0.0;
  std::array<double, kNumTps> per_tp_d{};
  int n_movies = 0;

  bool operator==(const MetricReport&) const = default;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

// Each movie's metrics are averaged over its gold annotations, then over movies.
inline MetricReport evaluate_run(const std::vector<Prediction>& preds, const CorpusSet& gold, Task task) {
  std::vector<std::string> missing;
  for (const auto& p : preds) {
    const Movie* m = gold.find(p.movie);
    const bool ok = m && (task == Task::Synopsis ? !m->synopsis_annotations.empty() : !m->screenplay_annotations.empty());
    if (!ok) missing.push_back(p.movie);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw InputError(std::string("evaluate: no gold ") + task_name(task) + " annotations for: " + list);
  }
  if (preds.empty()) throw InputError("evaluate: no predictions");

  MetricReport r;
  r.task = task;
  r.n_movies = static_cast<int>(preds.size());
  std::vector<double> ta, pa, d;
  std::array<std::vector<double>, kNumTps> per_tp;
  for (const auto& p : preds) {
    const Movie& m = gold.at(p.movie);
    double mta = 0, mpa = 0, md = 0;
    std::array<double, kNumTps> mtp{};
    std::size_t count = 0;
    if (task == Task::Synopsis) {
      const int n = m.synopsis_length();
      for (const auto& a : m.synopsis_annotations) {
        mta += ta_synopsis(p.tp_indices, a.tp_indices);
        for (int t = 0; t < kNumTps; ++t) {
          const double dt = d_synopsis(p.tp_indices[t], a.tp_indices[t], n);
          mtp[t] += dt;
          md += dt / kNumTps;
        }
        ++count;
      }
    } else {
      const int n = m.screenplay_length();
      for (const auto& a : m.screenplay_annotations) {
        mta += ta_scenes(p.tp_scenes, a.tp_scene_sets);
        mpa += pa_scenes(p.tp_scenes, a.tp_scene_sets);
        md += d_scenes(p.tp_scenes, a.tp_scene_sets, n);
        for (int t = 0; t < kNumTps; ++t) mtp[t] += d_scenes_tp(p.tp_scenes[t], a.tp_scene_sets[t], n);
        ++count;
      }
    }
    const double c = static_cast<double>(count);
    ta.push_back(100.0 * mta / c);
    pa.push_back(100.0 * mpa / c);
    d.push_back(100.0 * md / c);
    for (int t = 0; t < kNumTps; ++t) per_tp[t].push_back(100.0 * mtp[t] / c);
  }
  r.ta = mean_of(ta);
  r.pa = task == Task::Screenplay ? mean_of(pa) : 0.0;
  r.d_mean = mean_of(d);
  r.d_std = population_std(d);
  for (int t = 0; t < kNumTps; ++t) r.per_tp_d[t] = mean_of(per_tp[t]);
  return r;
}

inline nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json j{{"task", task_name(r.task)}, {"ta", r.ta},           {"d_mean", r.d_mean},
                   {"d_std", r.d_std},          {"per_tp_d", r.per_tp_d}, {"n_movies", r.n_movies}};
  if (r.task == Task::Screenplay) j["pa"] = r.pa;
  return j;
}

inline MetricReport report_from_json(const nlohmann::json& j) {
  MetricReport r;
  try {
    r.task = parse_task(j.at("task").get<std::string>());
    r.ta = j.at("ta").get<double>();
    r.pa = j.value("pa", 0.0);
    r.d_mean = j.at("d_mean").get<double>();
    r.d_std = j.at("d_std").get<double>();
    r.per_tp_d = j.at("per_tp_d").get<std::array<double, kNumTps>>();
    r.n_movies = j.at("n_movies").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("metric report: ") + e.what());
  }
  return r;
}

// Rows in the column order TA, PA, D (StDev), then D per TP.
inline std::string format_report_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::size_t w = 6;
  for (const auto& [name, r] : rows) w = std::max(w, name.size());
  const bool screen = !rows.empty() && rows.front().second.task == Task::Screenplay;
  auto pad = [&](std::string s) {
    s.resize(w, ' ');
    return s;
  };
  std::string out = pad("Method") + "  " + (screen ? "    TA     PA   D (StDev)" : "    TA   D (StDev)");
  out += "    TP1    TP2    TP3    TP4    TP5   n\n";
  char buf[160];
  for (const auto& [name, r] : rows) {
    if (screen)
      std::snprintf(buf, sizeof buf, "%6.2f %6.2f %6.2f (%5.2f)", r.ta, r.pa, r.d_mean, r.d_std);
    else
      std::snprintf(buf, sizeof buf, "%6.2f %6.2f (%5.2f)", r.ta, r.d_mean, r.d_std);
    out += pad(name) + "  " + buf;
    for (double x : r.per_tp_d) {
      std::snprintf(buf, sizeof buf, " %6.2f", x);
      out += buf;
    }
    out += " " + std::to_string(r.n_movies) + "\n";
  }
  return out;
}

// ---- folds ----------------------------------------------------------------------------

struct FoldPlan {
  std::vector<std::vector<std::string>> folds;

  bool operator==(const FoldPlan&) const = default;
};

// Seeded shuffle, then contiguous chunks whose sizes differ by at most one.
inline FoldPlan make_folds(std::vector<std::string> ids, int k, std::uint64_t seed) {
  if (k < 1) throw InputError("make_folds: k must be >= 1");
  if (static_cast<std::size_t>(k) > ids.size())
    throw InputError("make_folds: " + std::to_string(k) + " folds requested for " + std::to_string(ids.size()) + " movies");
  Rng rng(seed);
  rng.shuffle(ids);
  FoldPlan plan;
  const std::size_t base = ids.size() / k, extra = ids.size() % k;
  std::size_t at = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t n = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    plan.folds.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(at), ids.begin() + static_cast<std::ptrdiff_t>(at + n));
    at += n;
  }
  return plan;
}

}  // namespace tpid
