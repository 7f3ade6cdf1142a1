#include <gtest/gtest.h>

#include <algorithm>

#include "tpid/corpus.hpp"
#include "tpid/rng.hpp"
#include "tpid/supervision.hpp"

using namespace tpid;

namespace {

Movie annotated(const std::string& id, int n, std::vector<std::array<int, 5>> anns) {
  Movie m;
  m.id = id;
  for (int i = 0; i < n; ++i) m.synopsis.push_back("s" + std::to_string(i) + ".");
  m.screenplay = {Scene{"", {"x."}}};
  for (std::size_t a = 0; a < anns.size(); ++a) m.synopsis_annotations.push_back({"a" + std::to_string(a), anns[a]});
  return m;
}

TpStats reference_stats() {
  TpStats s;
  s.mu = {0.1139, 0.3186, 0.5065, 0.7415, 0.8943};
  s.sigma = {0.0672, 0.1126, 0.1215, 0.0840, 0.0474};
  return s;
}

}  // namespace

TEST(PositionStats, SingleMovie) {
  auto m = annotated("m", 10, {{1, 2, 5, 7, 9}});
  auto s = fit_position_stats({&m});
  const std::array<double, 5> mu{0.1, 0.2, 0.5, 0.7, 0.9};
  for (int t = 0; t < 5; ++t) {
    EXPECT_DOUBLE_EQ(s.mu[t], mu[t]);
    EXPECT_DOUBLE_EQ(s.sigma[t], 0.0);
  }
  EXPECT_EQ(s.source, "fitted");
}

TEST(PositionStats, EveryAnnotationCountsAndStdIsPopulation) {
  auto a = annotated("a", 10, {{1, 2, 5, 7, 9}, {1, 3, 5, 7, 9}});
  auto b = annotated("b", 20, {{2, 4, 12, 16, 18}});
  auto s = fit_position_stats({&a, &b});
  // TP2 positions: 0.2, 0.3, 0.2 -> mean 0.7/3, population variance
  const double mean = 0.7 / 3;
  const double var = ((0.2 - mean) * (0.2 - mean) * 2 + (0.3 - mean) * (0.3 - mean)) / 3;
  EXPECT_NEAR(s.mu[1], mean, 1e-15);
  EXPECT_NEAR(s.sigma[1], std::sqrt(var), 1e-15);
  EXPECT_DOUBLE_EQ(s.sigma[0], 0.0);  // same index twice
  EXPECT_NEAR(s.mu[2], (0.5 + 0.5 + 0.6) / 3, 1e-15);
}

TEST(PositionStats, PermutationInvariantAndInRange) {
  Rng rng(11);
  std::vector<Movie> movies;
  for (int k = 0; k < 30; ++k) {
    const int n = 5 + static_cast<int>(rng.below(40));
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    rng.shuffle(pool);
    std::array<int, 5> idx{};
    std::copy(pool.begin(), pool.begin() + 5, idx.begin());
    std::sort(idx.begin(), idx.end());
    movies.push_back(annotated("m" + std::to_string(k), n, {idx}));
  }
  std::vector<const Movie*> order;
  for (auto& m : movies) order.push_back(&m);
  const auto base = fit_position_stats(order);
  for (int trial = 0; trial < 5; ++trial) {
    rng.shuffle(order);
    EXPECT_EQ(fit_position_stats(order), base);
  }
  for (double mu : base.mu) {
    EXPECT_GE(mu, 0.0);
    EXPECT_LT(mu, 1.0);
  }
}

TEST(PositionStats, EmptyTrainingSetIsAnError) {
  EXPECT_THROW(fit_position_stats(std::vector<const Movie*>{}), InputError);
  auto m = annotated("m", 6, {});
  EXPECT_THROW(fit_position_stats({&m}), InputError);
}

TEST(PositionStats, TheoryConstants) {
  auto s = theory_stats();
  EXPECT_EQ(s.mu, (std::array<double, 5>{0.10, 0.25, 0.50, 0.75, 0.945}));
  EXPECT_EQ(s.sigma, (std::array<double, 5>{0, 0, 0, 0, 0}));
  EXPECT_EQ(s.source, "theory");
  EXPECT_NO_THROW(validate_stats(s));
}

TEST(PositionStats, JsonRoundTripAndValidation) {
  auto s = reference_stats();
  EXPECT_EQ(stats_from_json(stats_to_json(s)), s);
  auto j = stats_to_json(s);
  j["mu"][2] = 0.2;
  EXPECT_THROW(stats_from_json(j), InputError);
  j = stats_to_json(s);
  j["source"] = "guess";
  EXPECT_THROW(stats_from_json(j), InputError);
  EXPECT_THROW(stats_from_json(nlohmann::json::object()), InputError);
}

TEST(NoisyLabels, ReferenceStatsFirstTpWindowAtHundredScenes) {
  auto rows = make_noisy_labels(100, reference_stats());
  std::vector<int> pos;
  for (int i = 0; i < 100; ++i)
    if (rows[0][i]) pos.push_back(i);
  ASSERT_FALSE(pos.empty());
  EXPECT_EQ(pos.front(), 5);
  EXPECT_EQ(pos.back(), 18);
  EXPECT_EQ(pos.size(), 14u);
}

TEST(NoisyLabels, PointWindowAndSingleScene) {
  TpStats s = theory_stats();
  auto rows = make_noisy_labels(10, s);
  EXPECT_EQ(std::count(rows[2].begin(), rows[2].end(), 1), 1);
  EXPECT_EQ(rows[2][5], 1);
  // 0.945 * 10 = 9.45 is not a scene position: nearest-scene fallback
  EXPECT_EQ(rows[4][9], 1);
  auto one = make_noisy_labels(1, s);
  for (int t = 0; t < 5; ++t) EXPECT_EQ(one[t], (std::vector<std::uint8_t>{1}));
  EXPECT_THROW(make_noisy_labels(0, s), ContractError);
}

TEST(NoisyLabels, WindowPredicateAndContiguity) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    TpStats s;
    std::array<double, 5> mu{};
    for (auto& x : mu) x = rng.uniform(0.0, 0.999);
    std::sort(mu.begin(), mu.end());
    bool distinct = std::adjacent_find(mu.begin(), mu.end()) == mu.end();
    if (!distinct) continue;
    s.mu = mu;
    for (auto& x : s.sigma) x = rng.bernoulli(0.2) ? 0.0 : rng.uniform(0.0, 0.2);
    const int m = 1 + static_cast<int>(rng.below(60));
    auto rows = make_noisy_labels(m, s);
    for (int t = 0; t < 5; ++t) {
      int first = -1, last = -1, count = 0;
      bool any_in_window = false;
      for (int i = 0; i < m; ++i) {
        const double x = static_cast<double>(i) / m;
        const bool in = x >= s.lo(t) - 1e-9 && x <= s.hi(t) + 1e-9;
        any_in_window |= in;
        if (rows[t][i]) {
          if (first < 0) first = i;
          last = i;
          ++count;
        }
      }
      ASSERT_GE(count, 1);
      EXPECT_EQ(count, last - first + 1);
      if (any_in_window) {
        for (int i = 0; i < m; ++i) {
          const double x = static_cast<double>(i) / m;
          EXPECT_EQ(rows[t][i] == 1, x >= s.lo(t) - 1e-9 && x <= s.hi(t) + 1e-9);
        }
      } else {
        EXPECT_EQ(count, 1);
        // nearest to mu * m
        for (int i = 0; i < m; ++i) EXPECT_LE(std::abs(first - s.mu[t] * m), std::abs(i - s.mu[t] * m) + 1e-12);
      }
    }
  }
}

TEST(ClassWeights, Values) {
  auto w = class_weights(10, 90);
  EXPECT_DOUBLE_EQ(w.pos, 5.0);
  EXPECT_NEAR(w.neg, 0.5555555556, 1e-9);
  auto b = class_weights(7, 7);
  EXPECT_DOUBLE_EQ(b.pos, 1.0);
  EXPECT_DOUBLE_EQ(b.neg, 1.0);
  EXPECT_DOUBLE_EQ(class_weights(1, 999).pos, 500.0);
  EXPECT_THROW(class_weights(0, 5), InputError);
  EXPECT_THROW(class_weights(std::vector<std::uint8_t>{1, 1}), InputError);
}

TEST(ClassWeights, BalanceIdentity) {
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const std::size_t p = 1 + rng.below(1000), n = 1 + rng.below(1000);
    auto w = class_weights(p, n);
    EXPECT_NEAR(w.pos * p, (p + n) / 2.0, 1e-9);
    EXPECT_NEAR(w.neg * n, (p + n) / 2.0, 1e-9);
  }
}

TEST(Augmentation, OneInstancePerAnnotation) {
  auto a = annotated("a", 6, {{0, 1, 2, 3, 4}, {0, 1, 2, 3, 5}, {1, 2, 3, 4, 5}});
  auto b = annotated("b", 6, {{0, 1, 2, 3, 4}});
  auto c = annotated("c", 6, {});
  auto inst = augment_training_set({&a, &b, &c});
  ASSERT_EQ(inst.size(), 4u);
  EXPECT_EQ(inst[2].movie, &a);
  EXPECT_EQ(inst[2].synopsis_annotation().tp_indices[0], 1);
  EXPECT_EQ(inst[3].movie, &b);
  EXPECT_EQ(augment_training_set({&b}).size(), 1u);
}
