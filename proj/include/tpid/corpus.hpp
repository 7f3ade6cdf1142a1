#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tpid/error.hpp"
#include "tpid/text.hpp"

namespace tpid {

inline constexpr int kNumTps = 5;

inline constexpr std::array<std::string_view, kNumTps> kTpNames = {
    "Opportunity", "Change of Plans", "Point of No Return", "Major Setback", "Climax"};

enum class Split { Train, Dev, Test };

inline std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "dev") return Split::Dev;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

struct Scene {
  std::string heading;
  std::vector<std::string> sentences;
  bool operator==(const Scene&) const = default;
};

struct SynopsisAnnotation {
  std::string annotator;
  std::array<int, kNumTps> tp_indices{};
  bool operator==(const SynopsisAnnotation&) const = default;
};

// Sorted, duplicate-free scene indices.
using SceneSet = std::vector<int>;

struct ScreenplayAnnotation {
  std::string annotator;
  std::array<SceneSet, kNumTps> tp_scene_sets;
  bool operator==(const ScreenplayAnnotation&) const = default;
};

struct Movie {
  std::string id;
  std::string title;
  std::vector<std::string> synopsis;
  std::vector<Scene> screenplay;
  std::vector<std::string> cast;
  std::vector<SynopsisAnnotation> synopsis_annotations;
  std::vector<ScreenplayAnnotation> screenplay_annotations;

  int synopsis_length() const { return static_cast<int>(synopsis.size()); }
  int screenplay_length() const { return static_cast<int>(screenplay.size()); }
  bool operator==(const Movie&) const = default;
};

struct CorpusSet {
  std::vector<Movie> movies;
  std::map<std::string, Split> split_tags;

  const Movie* find(std::string_view id) const {
    for (const auto& m : movies)
      if (m.id == id) return &m;
    return nullptr;
  }

  const Movie& at(std::string_view id) const {
    if (const auto* m = find(id)) return *m;
    throw InputError("movie not in corpus: " + std::string(id));
  }

  // Movies carrying the given tag, in file order.
  std::vector<const Movie*> in_split(Split s) const {
    std::vector<const Movie*> out;
    for (const auto& m : movies) {
      auto it = split_tags.find(m.id);
      if (it != split_tags.end() && it->second == s) out.push_back(&m);
    }
    return out;
  }

  bool operator==(const CorpusSet&) const = default;
};

inline double normalize_position(int index, int length) {
  if (length <= 0) throw ContractError("normalize_position: length must be positive, got " + std::to_string(length));
  if (index < 0 || index >= length)
    throw ContractError("normalize_position: index " + std::to_string(index) + " out of range [0, " +
                        std::to_string(length) + ")");
  return static_cast<double>(index) / static_cast<double>(length);
}

// ---- scene splitting -------------------------------------------------------

inline bool is_scene_heading(std::string_view line) {
  const auto up = text::to_upper(text::trim(line));
  for (std::string_view p : {"INT.", "EXT.", "INT/EXT", "I/E."})
    if (up.starts_with(p)) return true;
  return false;
}

// A new scene starts at every heading line; text before the first heading
// becomes a scene with an empty heading. A scene whose body is empty keeps its
// heading as its single sentence so that every scene stays non-empty.
inline std::vector<Scene> split_scenes(std::string_view raw) {
  if (text::trim(raw).empty()) throw ContractError("split_scenes: screenplay text is blank");
  std::vector<Scene> scenes;
  std::string heading;
  std::string body;
  bool have_heading = false;

  auto flush = [&] {
    auto sentences = text::split_sentences(body);
    if (sentences.empty()) {
      if (!have_heading) return;
      sentences.push_back(heading);
    }
    scenes.push_back(Scene{heading, std::move(sentences)});
  };

  std::size_t pos = 0;
  while (pos <= raw.size()) {
    auto nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    const auto line = text::trim(raw.substr(pos, nl - pos));
    if (is_scene_heading(line)) {
      flush();
      heading = std::string(line);
      body.clear();
      have_heading = true;
    } else if (!line.empty()) {
      if (!body.empty()) body.push_back(' ');
      body.append(line);
    }
    pos = nl + 1;
  }
  flush();
  return scenes;
}

// ---- JSON ingestion ---------------------------------------------------------

namespace detail {

using nlohmann::json;

[[noreturn]] inline void corpus_fail(const std::string& movie, const std::string& field, const std::string& what) {
  throw InputError("corpus: movie '" + movie + "': field '" + field + "': " + what);
}

inline const json& member(const json& obj, const char* key, const std::string& movie) {
  auto it = obj.find(key);
  if (it == obj.end()) corpus_fail(movie, key, "missing");
  return *it;
}

inline std::string get_string(const json& v, const std::string& movie, const std::string& field) {
  if (!v.is_string()) corpus_fail(movie, field, "expected string");
  return v.get<std::string>();
}

inline std::vector<std::string> get_strings(const json& v, const std::string& movie, const std::string& field) {
  if (!v.is_array()) corpus_fail(movie, field, "expected array of strings");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(get_string(e, movie, field));
  return out;
}

inline int get_index(const json& v, int bound, const std::string& movie, const std::string& field) {
  if (!v.is_number_integer()) corpus_fail(movie, field, "expected integer index");
  const auto i = v.get<long long>();
  if (i < 0 || i >= bound)
    corpus_fail(movie, field, "index " + std::to_string(i) + " out of range [0, " + std::to_string(bound) + ")");
  return static_cast<int>(i);
}

inline Movie parse_movie(const json& j) {
  if (!j.is_object()) throw InputError("corpus: movie entry is not an object");
  std::string id = "?";
  if (auto it = j.find("id"); it != j.end() && it->is_string()) id = it->get<std::string>();
  else corpus_fail(id, "id", "missing or not a string");

  Movie m;
  m.id = id;
  m.title = j.contains("title") ? get_string(j["title"], id, "title") : std::string();
  m.synopsis = get_strings(member(j, "synopsis", id), id, "synopsis");
  for (auto& s : m.synopsis) {
    if (text::trim(s).empty()) corpus_fail(id, "synopsis", "empty sentence");
  }
  if (m.synopsis.size() < static_cast<std::size_t>(kNumTps))
    corpus_fail(id, "synopsis", "needs at least 5 sentences, got " + std::to_string(m.synopsis.size()));

  const auto& sp = member(j, "screenplay", id);
  if (!sp.is_array() || sp.empty()) corpus_fail(id, "screenplay", "expected non-empty array of scenes");
  for (const auto& sj : sp) {
    if (!sj.is_object()) corpus_fail(id, "screenplay", "scene is not an object");
    Scene sc;
    if (sj.contains("heading")) sc.heading = get_string(sj["heading"], id, "screenplay.heading");
    sc.sentences = get_strings(member(sj, "sentences", id), id, "screenplay.sentences");
    if (sc.sentences.empty()) corpus_fail(id, "screenplay.sentences", "scene has no sentences");
    for (auto& s : sc.sentences)
      if (text::trim(s).empty()) corpus_fail(id, "screenplay.sentences", "empty sentence");
    m.screenplay.push_back(std::move(sc));
  }

  if (j.contains("cast")) m.cast = get_strings(j["cast"], id, "cast");

  const int n = m.synopsis_length();
  const int scenes = m.screenplay_length();
  if (j.contains("synopsis_annotations")) {
    const auto& arr = j["synopsis_annotations"];
    if (!arr.is_array()) corpus_fail(id, "synopsis_annotations", "expected array");
    for (const auto& aj : arr) {
      SynopsisAnnotation a;
      if (aj.contains("annotator")) a.annotator = get_string(aj["annotator"], id, "synopsis_annotations.annotator");
      const auto& idx = member(aj, "tp_indices", id);
      if (!idx.is_array() || idx.size() != kNumTps)
        corpus_fail(id, "synopsis_annotations.tp_indices", "expected exactly 5 indices");
      for (int t = 0; t < kNumTps; ++t) a.tp_indices[t] = get_index(idx[t], n, id, "synopsis_annotations.tp_indices");
      for (int t = 1; t < kNumTps; ++t)
        if (a.tp_indices[t] <= a.tp_indices[t - 1])
          corpus_fail(id, "synopsis_annotations.tp_indices", "non-increasing TP indices");
      m.synopsis_annotations.push_back(std::move(a));
    }
  }
  if (j.contains("screenplay_annotations")) {
    const auto& arr = j["screenplay_annotations"];
    if (!arr.is_array()) corpus_fail(id, "screenplay_annotations", "expected array");
    for (const auto& aj : arr) {
      ScreenplayAnnotation a;
      if (aj.contains("annotator")) a.annotator = get_string(aj["annotator"], id, "screenplay_annotations.annotator");
      const auto& sets = member(aj, "tp_scene_sets", id);
      if (!sets.is_array() || sets.size() != kNumTps)
        corpus_fail(id, "screenplay_annotations.tp_scene_sets", "expected exactly 5 scene sets");
      for (int t = 0; t < kNumTps; ++t) {
        if (!sets[t].is_array() || sets[t].empty())
          corpus_fail(id, "screenplay_annotations.tp_scene_sets", "scene set must be a non-empty array");
        SceneSet s;
        for (const auto& v : sets[t]) s.push_back(get_index(v, scenes, id, "screenplay_annotations.tp_scene_sets"));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        a.tp_scene_sets[t] = std::move(s);
      }
      m.screenplay_annotations.push_back(std::move(a));
    }
  }
  return m;
}

}  // namespace detail

inline CorpusSet parse_corpus(std::string_view bytes) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("corpus: invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("movies") || !root["movies"].is_array())
    throw InputError("corpus: top-level object with a 'movies' array expected");

  CorpusSet c;
  for (const auto& mj : root["movies"]) {
    auto m = detail::parse_movie(mj);
    if (c.find(m.id)) throw InputError("corpus: duplicate movie id '" + m.id + "'");
    c.movies.push_back(std::move(m));
  }
  if (root.contains("splits")) {
    const auto& sj = root["splits"];
    if (!sj.is_object()) throw InputError("corpus: 'splits' must be an object");
    for (auto it = sj.begin(); it != sj.end(); ++it) {
      if (!c.find(it.key())) throw InputError("corpus: split tag refers to unknown movie '" + it.key() + "'");
      std::optional<Split> s;
      if (it->is_string()) s = parse_split(it->get<std::string>());
      if (!s) throw InputError("corpus: movie '" + it.key() + "': field 'splits': expected train|dev|test");
      c.split_tags[it.key()] = *s;
    }
  }
  return c;
}

inline nlohmann::json movie_to_json(const Movie& m) {
  using nlohmann::json;
  json j;
  j["id"] = m.id;
  j["title"] = m.title;
  j["synopsis"] = m.synopsis;
  json scenes = json::array();
  for (const auto& s : m.screenplay) scenes.push_back({{"heading", s.heading}, {"sentences", s.sentences}});
  j["screenplay"] = std::move(scenes);
  j["cast"] = m.cast;
  json sa = json::array();
  for (const auto& a : m.synopsis_annotations) sa.push_back({{"annotator", a.annotator}, {"tp_indices", a.tp_indices}});
  j["synopsis_annotations"] = std::move(sa);
  json pa = json::array();
  for (const auto& a : m.screenplay_annotations) pa.push_back({{"annotator", a.annotator}, {"tp_scene_sets", a.tp_scene_sets}});
  j["screenplay_annotations"] = std::move(pa);
  return j;
}

inline std::string serialize_corpus(const CorpusSet& c, int indent = -1) {
  using nlohmann::json;
  json root;
  root["movies"] = json::array();
  for (const auto& m : c.movies) root["movies"].push_back(movie_to_json(m));
  json splits = json::object();
  for (const auto& [id, s] : c.split_tags) splits[id] = std::string(split_name(s));
  root["splits"] = std::move(splits);
  return root.dump(indent);
}

}  // namespace tpid
