#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tpid/binary_io.hpp"
#include "tpid/corpus.hpp"
#include "tpid/error.hpp"
#include "tpid/text.hpp"

namespace tpid {

enum class Section { Synopsis, Scene };

struct EmbeddingKey {
  std::string movie;
  Section section = Section::Synopsis;
  int scene = -1;  // -1 for synopsis sentences
  int sentence = 0;

  static EmbeddingKey synopsis(std::string movie, int sentence) { return {std::move(movie), Section::Synopsis, -1, sentence}; }
  static EmbeddingKey scene_sentence(std::string movie, int scene, int sentence) {
    return {std::move(movie), Section::Scene, scene, sentence};
  }

  // movie|section|scene_idx|sent_idx
  std::string str() const {
    return movie + '|' + (section == Section::Synopsis ? "synopsis" : "scene") + '|' + std::to_string(scene) + '|' +
           std::to_string(sentence);
  }

  static EmbeddingKey parse(std::string_view s) {
    auto fail = [&] { throw InputError("malformed embedding key: '" + std::string(s) + "'"); };
    const auto p3 = s.rfind('|');
    if (p3 == std::string_view::npos || p3 == 0) fail();
    const auto p2 = s.rfind('|', p3 - 1);
    if (p2 == std::string_view::npos || p2 == 0) fail();
    const auto p1 = s.rfind('|', p2 - 1);
    if (p1 == std::string_view::npos) fail();
    EmbeddingKey k;
    k.movie = std::string(s.substr(0, p1));
    const auto sec = s.substr(p1 + 1, p2 - p1 - 1);
    if (sec == "synopsis") k.section = Section::Synopsis;
    else if (sec == "scene") k.section = Section::Scene;
    else fail();
    try {
      std::size_t used = 0;
      const std::string a(s.substr(p2 + 1, p3 - p2 - 1)), b(s.substr(p3 + 1));
      k.scene = std::stoi(a, &used);
      if (used != a.size()) fail();
      k.sentence = std::stoi(b, &used);
      if (used != b.size()) fail();
    } catch (const std::logic_error&) {
      fail();
    }
    return k;
  }

  bool operator==(const EmbeddingKey&) const = default;
};

namespace detail {

struct RecordFile {
  std::string encoder_name;
  std::uint32_t dim = 0;
  std::vector<std::pair<std::string, std::vector<float>>> records;
};

inline constexpr std::string_view kEmbMagic{"TPEMB\x01", 6};

inline void check_finite(std::span<const float> v, const std::string& key) {
  for (float x : v)
    if (!std::isfinite(x)) throw InputError("non-finite vector component for key '" + key + "'");
}

inline std::string write_records(std::string_view name, std::uint32_t dim,
                                 const std::map<std::string, std::vector<float>>& records) {
  io::ByteWriter w;
  w.bytes(kEmbMagic);
  w.u32(1);
  w.str16(name);
  w.u32(dim);
  w.u64(records.size());
  for (const auto& [key, vec] : records) {
    w.str16(key);
    w.f32s(vec.data(), vec.size());
  }
  return w.take();
}

inline RecordFile read_records(std::string_view bytes) {
  io::ByteReader r(bytes, "embedding store");
  if (bytes.size() < kEmbMagic.size() || r.bytes(kEmbMagic.size()) != kEmbMagic)
    throw InputError("embedding store: bad magic");
  const auto version = r.u32();
  if (version != 1) throw InputError("embedding store: unsupported version " + std::to_string(version));
  RecordFile f;
  f.encoder_name = r.str16();
  f.dim = r.u32();
  if (f.dim == 0) throw InputError("embedding store: dim must be positive");
  const auto count = r.u64();
  const std::uint64_t min_record = 2 + 4ull * f.dim;
  if (count > r.remaining() / min_record + 1)
    throw InputError("embedding store: record count " + std::to_string(count) + " exceeds file size (truncated or dim mismatch)");
  f.records.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    auto key = r.str16();
    std::vector<float> v(f.dim);
    r.f32s(v.data(), f.dim);
    check_finite(v, key);
    f.records.emplace_back(std::move(key), std::move(v));
  }
  if (!r.at_end())
    throw InputError("embedding store: " + std::to_string(r.remaining()) + " trailing bytes (dim mismatch?)");
  return f;
}

}  // namespace detail

class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::string encoder_name, std::size_t dim) : encoder_name_(std::move(encoder_name)), dim_(dim) {
    if (dim == 0) throw ContractError("EmbeddingStore: dim must be positive");
  }

  const std::string& encoder_name() const { return encoder_name_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  const std::map<std::string, std::vector<float>>& records() const { return records_; }

  void put(const EmbeddingKey& key, std::vector<float> v) { put(key.str(), std::move(v)); }

  void put(const std::string& key, std::vector<float> v) {
    if (v.size() != dim_)
      throw ContractError("EmbeddingStore: vector for '" + key + "' has length " + std::to_string(v.size()) +
                          ", store dim is " + std::to_string(dim_));
    detail::check_finite(v, key);
    records_[key] = std::move(v);
  }

  bool contains(const EmbeddingKey& key) const { return records_.count(key.str()) != 0; }

  const std::vector<float>& get(const EmbeddingKey& key) const {
    const auto k = key.str();
    auto it = records_.find(k);
    if (it == records_.end()) throw InputError("embedding store: missing key '" + k + "'");
    return it->second;
  }

  bool operator==(const EmbeddingStore&) const = default;

 private:
  std::string encoder_name_;
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<float>> records_;
};

inline const std::vector<float>& get_vec(const EmbeddingStore& store, const EmbeddingKey& key) { return store.get(key); }

inline std::string write_store(const EmbeddingStore& store) {
  return detail::write_records(store.encoder_name(), static_cast<std::uint32_t>(store.dim()), store.records());
}

// expected_dim == 0 accepts any dim.
inline EmbeddingStore read_store(std::string_view bytes, std::size_t expected_dim = 0) {
  auto f = detail::read_records(bytes);
  if (expected_dim != 0 && f.dim != expected_dim)
    throw InputError("embedding store: dim mismatch: file has " + std::to_string(f.dim) + ", expected " +
                     std::to_string(expected_dim));
  EmbeddingStore store(f.encoder_name, f.dim);
  for (auto& [k, v] : f.records) {
    (void)EmbeddingKey::parse(k);
    if (store.records().count(k)) throw InputError("embedding store: duplicate key '" + k + "'");
    store.put(k, std::move(v));
  }
  return store;
}

// JSONL interchange: a header line, then one {"key","vector"} object per line.
inline std::string export_jsonl(const EmbeddingStore& store) {
  using nlohmann::json;
  std::string out = json{{"encoder_name", store.encoder_name()}, {"dim", store.dim()}, {"count", store.size()}}.dump();
  out.push_back('\n');
  for (const auto& [k, v] : store.records()) {
    out += json{{"key", k}, {"vector", v}}.dump();
    out.push_back('\n');
  }
  return out;
}

inline EmbeddingStore import_jsonl(std::string_view data) {
  using nlohmann::json;
  std::size_t pos = 0, line_no = 0;
  EmbeddingStore store;
  bool have_header = false;
  while (pos < data.size()) {
    auto nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    auto line = text::trim(data.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      if (!have_header) {
        store = EmbeddingStore(j.at("encoder_name").get<std::string>(), j.at("dim").get<std::size_t>());
        have_header = true;
        continue;
      }
      auto key = j.at("key").get<std::string>();
      (void)EmbeddingKey::parse(key);
      store.put(key, j.at("vector").get<std::vector<float>>());
    } catch (const json::exception& e) {
      throw InputError("embedding jsonl line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ContractError& e) {
      throw InputError("embedding jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw InputError("embedding jsonl: missing header line");
  return store;
}

// ---- deterministic fallback embedder -----------------------------------------

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_bytes(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ mix64(seed);
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return mix64(h);
}

// Feature hashing: each whitespace token adds +-1 to one of `dim` buckets; the
// sum is L2-normalized. Blank input yields the zero vector. If the signed
// buckets of a non-blank sentence cancel exactly, one bucket chosen by the
// hash of the whole sentence is set instead, so the output is always unit norm.
inline std::vector<float> hash_embed(std::string_view sentence, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ContractError("hash_embed: dim must be >= 1");
  std::vector<double> acc(dim, 0.0);
  const auto tokens = text::split_whitespace(sentence);
  for (const auto& t : tokens) {
    const auto h = hash_bytes(t, seed);
    acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  std::vector<float> out(dim, 0.0f);
  if (tokens.empty()) return out;
  double norm2 = 0.0;
  for (double v : acc) norm2 += v * v;
  if (norm2 == 0.0) {
    out[hash_bytes(sentence, seed ^ 0xa5a5a5a5ull) % dim] = 1.0f;
    return out;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] * inv);
  return out;
}

// Store covering every synopsis and scene sentence of the corpus.
inline EmbeddingStore hash_embed_corpus(const CorpusSet& corpus, std::size_t dim, std::uint64_t seed) {
  EmbeddingStore store("hash-embed", dim);
  for (const auto& m : corpus.movies) {
    for (int i = 0; i < m.synopsis_length(); ++i)
      store.put(EmbeddingKey::synopsis(m.id, i), hash_embed(m.synopsis[i], dim, seed));
    for (int s = 0; s < m.screenplay_length(); ++s)
      for (int j = 0; j < static_cast<int>(m.screenplay[s].sentences.size()); ++j)
        store.put(EmbeddingKey::scene_sentence(m.id, s, j), hash_embed(m.screenplay[s].sentences[j], dim, seed));
  }
  return store;
}

// Keys a movie needs that the store lacks (synopsis and/or screenplay sentences).
inline std::vector<std::string> missing_keys(const Movie& m, const EmbeddingStore& store, bool synopsis, bool screenplay) {
  std::vector<std::string> out;
  if (synopsis)
    for (int i = 0; i < m.synopsis_length(); ++i)
      if (!store.contains(EmbeddingKey::synopsis(m.id, i))) out.push_back(EmbeddingKey::synopsis(m.id, i).str());
  if (screenplay)
    for (int s = 0; s < m.screenplay_length(); ++s)
      for (int j = 0; j < static_cast<int>(m.screenplay[s].sentences.size()); ++j)
        if (!store.contains(EmbeddingKey::scene_sentence(m.id, s, j)))
          out.push_back(EmbeddingKey::scene_sentence(m.id, s, j).str());
  return out;
}

// ---- word / entity vectors ----------------------------------------------------

class WordVectorTable {
 public:
  WordVectorTable() : WordVectorTable(300) {}
  explicit WordVectorTable(std::size_t dim) : dim_(dim), zero_(dim, 0.0f) {
    if (dim == 0) throw ContractError("WordVectorTable: dim must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<float>>& entries() const { return entries_; }

  void put(const std::string& token, std::vector<float> v) {
    if (v.size() != dim_) throw ContractError("WordVectorTable: vector for '" + token + "' has wrong length");
    detail::check_finite(v, token);
    entries_[token] = std::move(v);
  }

  // Unknown tokens map to the zero vector.
  const std::vector<float>& lookup(const std::string& token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? zero_ : it->second;
  }

  bool operator==(const WordVectorTable& o) const { return dim_ == o.dim_ && entries_ == o.entries_; }

 private:
  std::size_t dim_;
  std::vector<float> zero_;
  std::map<std::string, std::vector<float>> entries_;
};

// Word tables share the store's binary container; keys are raw tokens.
inline std::string write_word_table(const WordVectorTable& t) {
  return detail::write_records("wordvec", static_cast<std::uint32_t>(t.dim()), t.entries());
}

inline WordVectorTable read_word_table(std::string_view bytes) {
  auto f = detail::read_records(bytes);
  WordVectorTable t(f.dim);
  for (auto& [k, v] : f.records) t.put(k, std::move(v));
  return t;
}

// word2vec text format ("token v1 ... vdim" per line, optional "count dim" header).
inline WordVectorTable read_word2vec_text(std::string_view data) {
  std::size_t pos = 0;
  std::optional<WordVectorTable> table;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    auto nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    auto fields = text::split_whitespace(data.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (fields.empty()) continue;
    if (!table && fields.size() == 2) {
      table.emplace(static_cast<std::size_t>(std::stoul(fields[1])));
      continue;
    }
    if (!table) table.emplace(fields.size() - 1);
    if (fields.size() != table->dim() + 1)
      throw InputError("word vectors line " + std::to_string(line_no) + ": expected " + std::to_string(table->dim()) + " values");
    std::vector<float> v(table->dim());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::stof(fields[i + 1]);
    table->put(fields[0], std::move(v));
  }
  if (!table) throw InputError("word vectors: empty input");
  return std::move(*table);
}

}  // namespace tpid
