#include <gtest/gtest.h>

#include <string>

#include "tpid/corpus.hpp"
#include "tpid/rng.hpp"
#include "tpid/text.hpp"

using namespace tpid;

namespace {

std::string minimal_movie_json(const std::string& tp_indices) {
  return R"({"movies":[{"id":"m1","title":"Minimal","synopsis":["One.","Two.","Three.","Four.","Five."],
    "screenplay":[{"heading":"INT. ROOM - DAY","sentences":["A door opens."]}],"cast":["Ann"],
    "synopsis_annotations":[{"annotator":"a","tp_indices":)" +
         tp_indices + R"(}],"screenplay_annotations":[]}],"splits":{"m1":"train"}})";
}

}  // namespace

TEST(Text, SentenceSplitting) {
  auto s = text::split_sentences("He runs. She waits? Yes! Dr.Who stays.  ");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0], "He runs.");
  EXPECT_EQ(s[1], "She waits?");
  EXPECT_EQ(s[2], "Yes!");
  EXPECT_EQ(s[3], "Dr.Who stays.");
  EXPECT_EQ(text::split_sentences("no terminal punctuation").size(), 1u);
}

TEST(Text, Tokenizers) {
  EXPECT_EQ(text::tfidf_tokens("A man's 2nd gun, x-ray!"), (std::vector<std::string>{"man", "2nd", "gun", "ray"}));
  EXPECT_EQ(text::entity_tokens("\"Juno_MacGuff\" meets Paulie."), (std::vector<std::string>{"juno_macguff", "meets", "paulie"}));
}

TEST(NormalizePosition, Values) {
  EXPECT_DOUBLE_EQ(normalize_position(0, 40), 0.0);
  EXPECT_DOUBLE_EQ(normalize_position(10, 40), 0.25);
  EXPECT_DOUBLE_EQ(normalize_position(39, 40), 0.975);
  EXPECT_THROW(normalize_position(40, 40), ContractError);
  EXPECT_THROW(normalize_position(-1, 40), ContractError);
}

TEST(SplitScenes, SingleHeading) {
  auto scenes = split_scenes("INT. HOUSE - NIGHT\nA man waits.");
  ASSERT_EQ(scenes.size(), 1u);
  EXPECT_EQ(scenes[0].heading, "INT. HOUSE - NIGHT");
  EXPECT_EQ(scenes[0].sentences, (std::vector<std::string>{"A man waits."}));
}

TEST(SplitScenes, PreambleAndHeadingVariants) {
  const std::string raw =
      "FADE IN. Titles roll.\n"
      "EXT. BEACH - DAY\nWaves crash. Gulls cry!\n"
      "  ext. road - night\nA car passes.\n"
      "INT/EXT. CAR - CONTINUOUS\nShe drives\non and on.\n"
      "I/E. PORCH\n";
  auto scenes = split_scenes(raw);
  ASSERT_EQ(scenes.size(), 5u);
  EXPECT_EQ(scenes[0].heading, "");
  EXPECT_EQ(scenes[0].sentences.size(), 2u);
  EXPECT_EQ(scenes[1].sentences, (std::vector<std::string>{"Waves crash.", "Gulls cry!"}));
  EXPECT_EQ(scenes[2].heading, "ext. road - night");
  EXPECT_EQ(scenes[3].sentences, (std::vector<std::string>{"She drives on and on."}));
  // empty body keeps the heading as its only sentence
  EXPECT_EQ(scenes[4].sentences, (std::vector<std::string>{"I/E. PORCH"}));
}

TEST(SplitScenes, ThreeHeadingsWithoutPreamble) {
  auto scenes = split_scenes("EXT. A\nOne.\nEXT. B\nTwo.\nEXT. C\nThree.");
  EXPECT_EQ(scenes.size(), 3u);
  EXPECT_EQ(split_scenes("Intro text.\nEXT. A\nOne.\nEXT. B\nTwo.\nEXT. C\nThree.").size(), 4u);
  // "INTERIOR" is not a heading
  EXPECT_EQ(split_scenes("INTERIOR monologue.\nEXT. A\nOne.").size(), 2u);
}

TEST(SplitScenes, EveryBodySentenceAppearsOnceInOrder) {
  Rng rng(3);
  const char* words[] = {"alpha", "beta", "gamma", "delta", "omega"};
  for (int trial = 0; trial < 100; ++trial) {
    std::string raw;
    std::vector<std::string> expected;
    const int scenes = 1 + static_cast<int>(rng.below(6));
    for (int s = 0; s < scenes; ++s) {
      raw += (rng.bernoulli(0.5) ? "INT. PLACE " : "EXT. PLACE ") + std::to_string(s) + "\n";
      const int n = 1 + static_cast<int>(rng.below(4));
      for (int k = 0; k < n; ++k) {
        std::string sent = std::string(words[rng.below(5)]) + " " + words[rng.below(5)] + " " + std::to_string(trial * 100 + s * 10 + k) + ".";
        expected.push_back(sent);
        raw += sent + (rng.bernoulli(0.5) ? "\n" : " ");
      }
      raw += "\n";
    }
    auto out = split_scenes(raw);
    ASSERT_EQ(static_cast<int>(out.size()), scenes);
    std::vector<std::string> got;
    for (auto& sc : out) got.insert(got.end(), sc.sentences.begin(), sc.sentences.end());
    EXPECT_EQ(got, expected);
  }
}

TEST(SplitScenes, BlankInputIsAContractViolation) { EXPECT_THROW(split_scenes("  \n "), ContractError); }

TEST(ParseCorpus, MinimalMovie) {
  auto c = parse_corpus(minimal_movie_json("[0,1,2,3,4]"));
  ASSERT_EQ(c.movies.size(), 1u);
  const auto& m = c.movies[0];
  EXPECT_EQ(m.synopsis_length(), 5);
  EXPECT_EQ(m.screenplay_length(), 1);
  EXPECT_EQ(m.synopsis_annotations[0].tp_indices, (std::array<int, 5>{0, 1, 2, 3, 4}));
  EXPECT_EQ(c.in_split(Split::Train).size(), 1u);
}

TEST(ParseCorpus, RejectsNonIncreasingIndices) {
  try {
    parse_corpus(minimal_movie_json("[3,1,2,3,4]"));
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("non-increasing TP indices"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("m1"), std::string::npos);
  }
}

TEST(ParseCorpus, OutOfRangeIndexNamesIndexAndBound) {
  try {
    parse_corpus(minimal_movie_json("[0,1,2,3,9]"));
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("index 9"), std::string::npos) << w;
    EXPECT_NE(w.find("[0, 5)"), std::string::npos) << w;
  }
}

TEST(ParseCorpus, SchemaViolations) {
  EXPECT_THROW(parse_corpus("{not json"), InputError);
  EXPECT_THROW(parse_corpus(R"({"films":[]})"), InputError);
  EXPECT_THROW(parse_corpus(minimal_movie_json("[0,1,2,3]")), InputError);
  // short synopsis
  EXPECT_THROW(parse_corpus(R"({"movies":[{"id":"x","synopsis":["a.","b."],"screenplay":[{"sentences":["s."]}]}]})"), InputError);
  // empty sentence
  EXPECT_THROW(parse_corpus(R"({"movies":[{"id":"x","synopsis":["a.","b.","c.","d."," "],"screenplay":[{"sentences":["s."]}]}]})"), InputError);
  // empty screenplay
  EXPECT_THROW(parse_corpus(R"({"movies":[{"id":"x","synopsis":["a.","b.","c.","d.","e."],"screenplay":[]}]})"), InputError);
  // unknown split target and bad tag
  EXPECT_THROW(parse_corpus(R"({"movies":[],"splits":{"ghost":"train"}})"), InputError);
  auto dup = R"({"movies":[{"id":"x","synopsis":["a.","b.","c.","d.","e."],"screenplay":[{"sentences":["s."]}]},
                           {"id":"x","synopsis":["a.","b.","c.","d.","e."],"screenplay":[{"sentences":["s."]}]}]})";
  EXPECT_THROW(parse_corpus(dup), InputError);
  auto bad_set = R"({"movies":[{"id":"x","synopsis":["a.","b.","c.","d.","e."],"screenplay":[{"sentences":["s."]}],
      "screenplay_annotations":[{"annotator":"a","tp_scene_sets":[[0],[0],[],[0],[0]]}]}]})";
  EXPECT_THROW(parse_corpus(bad_set), InputError);
}

TEST(ParseCorpus, SerializeRoundTripIsStable) {
  const std::string src = R"({"movies":[
    {"id":"b","title":"B","synopsis":["s0.","s1.","s2.","s3.","s4.","s5."],
     "screenplay":[{"heading":"INT. A","sentences":["x.","y."]},{"heading":"","sentences":["z."]},{"sentences":["w."]}],
     "cast":["Ann","Bo"],
     "synopsis_annotations":[{"annotator":"p","tp_indices":[0,1,3,4,5]},{"annotator":"q","tp_indices":[0,2,3,4,5]}],
     "screenplay_annotations":[{"annotator":"p","tp_scene_sets":[[1,0,1],[1],[2],[0,2],[2]]}]},
    {"id":"a","synopsis":["t0.","t1.","t2.","t3.","t4."],"screenplay":[{"sentences":["only."]}]}],
    "splits":{"a":"test","b":"dev"}})";
  auto once = parse_corpus(src);
  auto twice = parse_corpus(serialize_corpus(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once.movies[0].id, "b");
  EXPECT_EQ(once.movies[0].screenplay_annotations[0].tp_scene_sets[0], (SceneSet{0, 1}));
  EXPECT_EQ(once.in_split(Split::Dev).front()->id, "b");
}
