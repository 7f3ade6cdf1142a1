#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "tpid/embedstore.hpp"

using namespace tpid;

namespace {

std::size_t header_size(const std::string& name) { return 6 + 4 + 2 + name.size() + 4 + 8; }

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += double(a[i]) * b[i];
    na += double(a[i]) * a[i];
    nb += double(b[i]) * b[i];
  }
  return d / std::sqrt(na * nb);
}

}  // namespace

TEST(EmbeddingKey, FormatAndParse) {
  auto k = EmbeddingKey::scene_sentence("the|movie", 3, 7);
  EXPECT_EQ(k.str(), "the|movie|scene|3|7");
  EXPECT_EQ(EmbeddingKey::parse(k.str()), k);
  EXPECT_EQ(EmbeddingKey::synopsis("m", 2).str(), "m|synopsis|-1|2");
  EXPECT_THROW(EmbeddingKey::parse("m|synopsis|2"), InputError);
  EXPECT_THROW(EmbeddingKey::parse("m|trailer|-1|2"), InputError);
}

TEST(EmbedStoreFormat, EmptyStoreIsHeaderOnly) {
  EmbeddingStore s("enc", 4);
  auto bytes = write_store(s);
  EXPECT_EQ(bytes.size(), header_size("enc"));
  EXPECT_EQ(bytes.substr(0, 6), std::string("TPEMB\x01", 6));
  auto back = read_store(bytes);
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.dim(), 4u);
  EXPECT_EQ(back.size(), 0u);
}

TEST(EmbedStoreFormat, LengthForcedByLayout) {
  EmbeddingStore s("use", 3);
  auto k1 = EmbeddingKey::synopsis("m", 0), k2 = EmbeddingKey::scene_sentence("m", 1, 2);
  s.put(k1, {1, 2, 3});
  s.put(k2, {-1, 0.5f, 0});
  auto bytes = write_store(s);
  EXPECT_EQ(bytes.size(), header_size("use") + (2 + k1.str().size() + 12) + (2 + k2.str().size() + 12));
  auto back = read_store(bytes, 3);
  EXPECT_EQ(back, s);
  EXPECT_EQ(get_vec(back, k2), (std::vector<float>{-1, 0.5f, 0}));
}

TEST(EmbedStoreFormat, CorruptInputs) {
  EmbeddingStore s("enc", 2);
  s.put(EmbeddingKey::synopsis("m", 0), {1, 2});
  auto bytes = write_store(s);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(read_store(bad_magic), InputError);

  auto bad_version = bytes;
  bad_version[6] = 2;
  EXPECT_THROW(read_store(bad_version), InputError);

  EXPECT_THROW(read_store(bytes.substr(0, bytes.size() - 1)), InputError);
  EXPECT_THROW(read_store(bytes + "x"), InputError);
  EXPECT_THROW(read_store(bytes, 3), InputError);

  auto nan_bytes = bytes;
  const float nan = std::nanf("");
  std::memcpy(nan_bytes.data() + nan_bytes.size() - 4, &nan, 4);
  EXPECT_THROW(read_store(nan_bytes), InputError);
}

TEST(EmbedStore, MissingKeyNamesTheKey) {
  EmbeddingStore s("enc", 2);
  try {
    (void)s.get(EmbeddingKey::synopsis("m", 4));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("m|synopsis|-1|4"), std::string::npos);
  }
  EXPECT_THROW(s.put(EmbeddingKey::synopsis("m", 0), {1, 2, 3}), ContractError);
}

TEST(EmbedStore, JsonlRoundTrip) {
  EmbeddingStore s("enc", 3);
  s.put(EmbeddingKey::synopsis("a", 0), {0.25f, -1.5f, 3});
  s.put(EmbeddingKey::scene_sentence("a", 0, 1), {1e-7f, 0, 2});
  auto back = import_jsonl(export_jsonl(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(write_store(back), write_store(s));
  EXPECT_THROW(import_jsonl(""), InputError);
  EXPECT_THROW(import_jsonl("{\"encoder_name\":\"e\",\"dim\":2}\n{\"key\":\"a|synopsis|-1|0\",\"vector\":[1]}\n"), InputError);
}

TEST(HashEmbed, DeterministicUnitNorm) {
  auto a = hash_embed("the quick brown fox", 64, 7);
  EXPECT_EQ(a, hash_embed("the quick brown fox", 64, 7));
  EXPECT_NE(a, hash_embed("the quick brown fox", 64, 8));
  double n = 0;
  for (float x : a) n += double(x) * x;
  EXPECT_NEAR(n, 1.0, 1e-6);
  auto b = hash_embed("a slow red fox", 64, 7);
  EXPECT_LT(cosine(a, b), 1.0 - 1e-6);
  EXPECT_EQ(hash_embed("   ", 8, 1), std::vector<float>(8, 0.0f));
  EXPECT_THROW(hash_embed("x", 0, 1), ContractError);
}

TEST(HashEmbed, AlwaysUnitNormForNonBlankInput) {
  // dim 1 makes cancellation likely: "x x" vs "x y"
  for (const char* s : {"x", "x y", "a b c d", "p q"}) {
    auto v = hash_embed(s, 1, 3);
    EXPECT_NEAR(std::abs(v[0]), 1.0f, 1e-6) << s;
  }
}

TEST(HashEmbed, CorpusCoverage) {
  CorpusSet c;
  Movie m;
  m.id = "m";
  m.synopsis = {"a.", "b.", "c.", "d.", "e."};
  m.screenplay = {Scene{"", {"x.", "y."}}, Scene{"", {"z."}}};
  c.movies.push_back(m);
  auto store = hash_embed_corpus(c, 16, 1);
  EXPECT_EQ(store.size(), 8u);
  EXPECT_TRUE(missing_keys(m, store, true, true).empty());
  EmbeddingStore partial("x", 16);
  EXPECT_EQ(missing_keys(m, partial, true, false).size(), 5u);
  EXPECT_EQ(missing_keys(m, partial, false, true).size(), 3u);
}

TEST(WordVectorTable, LookupAndFormats) {
  WordVectorTable t(3);
  t.put("juno", {1, 2, 3});
  EXPECT_EQ(t.lookup("juno"), (std::vector<float>{1, 2, 3}));
  EXPECT_EQ(t.lookup("nobody"), (std::vector<float>{0, 0, 0}));
  EXPECT_EQ(WordVectorTable().dim(), 300u);

  auto bytes = write_word_table(t);
  EXPECT_EQ(read_word_table(bytes), t);
  EXPECT_EQ(read_word_table(write_word_table(WordVectorTable(3))).size(), 0u);

  auto w2v = read_word2vec_text("2 3\njuno 1 2 3\npaulie 0.5 0 -1\n");
  EXPECT_EQ(w2v.size(), 2u);
  EXPECT_EQ(w2v.lookup("paulie"), (std::vector<float>{0.5f, 0, -1}));
  EXPECT_THROW(read_word2vec_text("juno 1 2 3\nbad 1 2\n"), InputError);
}
