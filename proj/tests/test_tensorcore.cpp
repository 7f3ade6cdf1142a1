#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "support/gradcheck.hpp"
#include "support/reference.hpp"
#include "tpid/nn/adam.hpp"
#include "tpid/nn/autodiff.hpp"
#include "tpid/nn/checkpoint_io.hpp"
#include "tpid/nn/layers.hpp"

using namespace tpid;
using namespace tpid::nn;
using tpid::testkit::reference_lstm;

namespace {

std::vector<Vec> random_seq(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<Vec> out(n, Vec(dim));
  for (auto& v : out)
    for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
  return out;
}

}  // namespace

TEST(BiLstm, ZeroParamsGiveZeroOutputs) {
  BiLstmParams p(4, 3);
  Rng rng(1);
  auto seq = random_seq(rng, 5, 4);
  auto out = bilstm_forward(p.fwd, p.bwd, seq);
  ASSERT_EQ(out.size(), 5u);
  for (const auto& v : out) {
    ASSERT_EQ(v.size(), 6u);
    for (float x : v) EXPECT_EQ(x, 0.0f);
  }
}

TEST(BiLstm, SingleStepIsDirectionSymmetric) {
  Rng rng(7);
  LstmParams a(3, 4);
  a.init(rng);
  LstmParams b = a;
  auto seq = random_seq(rng, 1, 3);
  auto out = bilstm_forward(a, b, seq);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out[0][i], out[0][4 + i]);
}

TEST(BiLstm, MatchesScalarReference) {
  Rng rng(0);
  BiLstmParams p(5, 4);
  p.init(rng);
  auto seq = random_seq(rng, 3, 5);
  auto out = bilstm_forward(p.fwd, p.bwd, seq);
  auto f = reference_lstm(p.fwd, seq, false);
  auto r = reference_lstm(p.bwd, seq, true);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t s = 0; s < 4; ++s) {
      EXPECT_NEAR(out[t][s], f[t][s], 1e-6);
      EXPECT_NEAR(out[t][4 + s], r[t][s], 1e-6);
    }
}

TEST(BiLstm, RejectsDimMismatch) {
  BiLstmParams p(4, 2);
  std::vector<Vec> seq = {Vec(3, 0.0f)};
  EXPECT_THROW(bilstm_forward(p.fwd, p.bwd, seq), ContractError);
}

TEST(AttentionPool, SingleElementGetsFullWeight) {
  Rng rng(3);
  AttentionParams p(3);
  p.init(rng);
  auto r = attention_pool(p, {Vec{0.5f, -1.0f, 2.0f}});
  ASSERT_EQ(r.weights.size(), 1u);
  EXPECT_FLOAT_EQ(r.weights[0], 1.0f);
  EXPECT_FLOAT_EQ(r.output[2], 2.0f);
}

TEST(AttentionPool, ZeroParamsAverage) {
  AttentionParams p(2);
  auto r = attention_pool(p, {Vec{1, 2}, Vec{3, 4}, Vec{5, 9}, Vec{-1, 1}});
  for (float w : r.weights) EXPECT_FLOAT_EQ(w, 0.25f);
  EXPECT_FLOAT_EQ(r.output[0], 2.0f);
  EXPECT_FLOAT_EQ(r.output[1], 4.0f);
}

TEST(AttentionPool, CraftedWeightsMatchHandSoftmax) {
  AttentionParams p(2);
  p.w.data = {1.0f, 0.0f};
  auto r = attention_pool(p, {Vec{0, 0}, Vec{1, 0}, Vec{2, 0}});
  // softmax(tanh(0), tanh(1), tanh(2))
  EXPECT_NEAR(r.weights[0], 0.17349291, 1e-6);
  EXPECT_NEAR(r.weights[1], 0.37156764, 1e-6);
  EXPECT_NEAR(r.weights[2], 0.45493945, 1e-6);
  EXPECT_NEAR(r.output[0], 1.28144654, 1e-6);
}

TEST(AttentionPool, WeightsAreADistribution) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    AttentionParams p(4);
    p.init(rng);
    for (auto& w : p.w.data) w *= 10.0f;
    auto r = attention_pool(p, random_seq(rng, 1 + rng.below(9), 4));
    double s = 0.0;
    for (float w : r.weights) {
      EXPECT_GE(w, 0.0f);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(DenseSigmoid, Values) {
  Vec w0 = {0, 0}, x = {0.5f, 0.5f}, w1 = {1, 1};
  EXPECT_DOUBLE_EQ(dense_sigmoid(w0, 0.0f, x), 0.5);
  EXPECT_NEAR(dense_sigmoid(w1, 0.0f, x), 0.73106, 1e-5);
  const double big = dense_sigmoid(w1, 1e30f, x);
  EXPECT_LT(big, 1.0);
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_THROW(dense_sigmoid(w1, 0.0f, Vec{1.0f}), ContractError);
}

TEST(DenseSigmoid, TapeSaturationStaysInsideOpenInterval) {
  Tape<float> tape;
  auto hi = sigmoid(tape.constant(Vec{1e6f}));
  auto lo = sigmoid(tape.constant(Vec{-1e6f}));
  EXPECT_LT(hi.scalar(), 1.0f);
  EXPECT_GT(lo.scalar(), 0.0f);
}

TEST(WeightedBce, Values) {
  EXPECT_NEAR(weighted_bce(0.5, 1, 2.0, 1.0), 1.38629, 1e-5);
  EXPECT_NEAR(weighted_bce(1.0 - 1e-7, 1, 3.0, 1.0), 0.0, 1e-6);
  EXPECT_NEAR(weighted_bce(0.9, 0, 1.0, 1.0), 2.30259, 1e-5);
  // exact 0 and 1 are clamped instead of producing infinities
  EXPECT_TRUE(std::isfinite(weighted_bce(0.0, 1, 1.0, 1.0)));
  EXPECT_TRUE(std::isfinite(weighted_bce(1.0, 0, 1.0, 1.0)));
}

TEST(WeightedBce, TapeMatchesValueForm) {
  Tape<double> tape;
  auto p = tape.constant(std::vector<double>{0.3});
  EXPECT_NEAR(weighted_bce(p, 1, 2.0, 0.5).scalar(), weighted_bce(0.3, 1, 2.0, 0.5), 1e-12);
  EXPECT_NEAR(weighted_bce(p, 0, 2.0, 0.5).scalar(), weighted_bce(0.3, 0, 2.0, 0.5), 1e-12);
}

TEST(Backward, LinearLossGradientIsInput) {
  Tensor w({3});
  w.data = {0.3f, -0.2f, 0.9f};
  Tape<float> tape;
  auto x = tape.constant(Vec{1.5f, -2.0f, 0.25f});
  auto loss = dot(tape.param(w), x);
  tape.backward(loss);
  EXPECT_EQ(w.grad, (Vec{1.5f, -2.0f, 0.25f}));
}

TEST(Backward, RequiresRecordedScalar) {
  Tape<float> tape;
  EXPECT_THROW(tape.backward(Var<float>{}), StateError);
  auto v = tape.constant(Vec{1, 2});
  EXPECT_THROW(tape.backward(v), ContractError);
}

TEST(Backward, ComposedOpsMatchFiniteDifferences) {
  Rng rng(5);
  Tensor a({4}), b({4}), W({3, 4});
  init_uniform(a, rng, 1.0);
  init_uniform(b, rng, 1.0);
  init_uniform(W, rng, 1.0);
  ParamList ps = {{"a", &a}, {"b", &b}, {"W", &W}};
  auto build = [&](auto& tape) {
    using T = typename std::decay_t<decltype(tape)>::value_type;
    auto av = tape.param(a), bv = tape.param(b), Wv = tape.param(W);
    auto cosine = div(dot(av, bv), max_floor(mul(norm2(av), norm2(bv)), T(1e-8)));
    auto sm = softmax(tanh(matvec(Wv, mul(av, bv))));
    auto pooled = weighted_sum(sm, {slice(av, 0, 2), slice(bv, 1, 2), slice(av, 2, 2)});
    auto parts = concat<T>({pooled, cosine, sum(exp(scale(bv, T(0.5))))});
    auto p = sigmoid(dot(parts, add(parts, mean<T>({parts, parts}))));
    auto tail = log(add_scalar(clamp(sum(sub(parts, scale(parts, T(0.3)))), T(-5), T(5)), T(6)));
    return add(weighted_bce(p, 1, 2.0, 0.7), tail);
  };
  auto rep = testkit::grad_check(ps, build);
  EXPECT_LT(rep.max_rel_error, 1e-3) << rep.worst_param << "[" << rep.worst_index << "] analytic " << rep.worst_analytic
                                     << " numeric " << rep.worst_numeric;
}

TEST(Backward, LstmAttentionStackMatchesFiniteDifferences) {
  Rng rng(9);
  BiLstmParams enc(4, 3);
  AttentionParams att(6);
  DenseParams out(6);
  enc.init(rng);
  att.init(rng);
  out.init(rng);
  ParamList ps;
  enc.collect(ps, "enc");
  att.collect(ps, "att");
  out.collect(ps, "out");
  auto seq = random_seq(rng, 5, 4);
  auto build = [&](auto& tape) {
    using V = decltype(tape.zeros(1));
    std::vector<V> xs;
    for (auto& x : seq) xs.push_back(tape.constant(std::span<const float>(x)));
    auto pooled = attention_pool(tape, att, bilstm(tape, enc, xs)).output;
    return weighted_bce(dense_sigmoid(tape, out, pooled), 0, 1.3, 0.6);
  };
  auto rep = testkit::grad_check(ps, build);
  EXPECT_LT(rep.max_rel_error, 1e-3) << rep.worst_param << "[" << rep.worst_index << "] analytic " << rep.worst_analytic
                                     << " numeric " << rep.worst_numeric;
}

TEST(Backward, ZeroWeightNetworkGradientIsFinite) {
  BiLstmParams enc(3, 2);
  DenseParams out(4);
  ParamList ps;
  enc.collect(ps, "enc");
  out.collect(ps, "out");
  Tape<float> tape;
  std::vector<Var<float>> xs = {tape.constant(Vec{1, 0, 0}), tape.constant(Vec{0, 1, 0})};
  auto hs = bilstm(tape, enc, xs);
  auto loss = add(weighted_bce(dense_sigmoid(tape, out, hs[0]), 1, 1.0, 1.0),
                  weighted_bce(dense_sigmoid(tape, out, hs[1]), 0, 1.0, 1.0));
  tape.backward(loss);
  for (auto& [n, t] : ps)
    for (float g : t->grad) EXPECT_TRUE(std::isfinite(g)) << n;
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Tensor w({3});
  w.data = {1.0f, -2.0f, 0.5f};
  w.grad = {1.0f, 1.0f, 1.0f};
  ParamList ps = {{"w", &w}};
  AdamState st(ps);
  adam_step(st, ps);
  EXPECT_EQ(st.step, 1u);
  EXPECT_NEAR(w.data[0], 1.0 - 1e-3, 1e-7);
  EXPECT_NEAR(w.data[1], -2.0 - 1e-3, 1e-7);
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  Tensor w({2});
  w.data = {0.25f, -0.75f};
  ParamList ps = {{"w", &w}};
  AdamState st(ps);
  adam_step(st, ps);
  adam_step(st, ps);
  EXPECT_EQ(w.data, (Vec{0.25f, -0.75f}));
}

TEST(Adam, ConstantGradientMovesMonotonically) {
  Tensor w({2});
  ParamList ps = {{"w", &w}};
  AdamState st(ps);
  std::vector<Vec> history;
  for (int k = 0; k < 3; ++k) {
    w.grad = {0.5f, -3.0f};
    adam_step(st, ps);
    history.push_back(w.data);
  }
  EXPECT_LT(history[1][0], history[0][0]);
  EXPECT_LT(history[2][0], history[1][0]);
  EXPECT_GT(history[1][1], history[0][1]);
  EXPECT_GT(history[2][1], history[1][1]);
}

TEST(Adam, ShapeMismatchIsRejected) {
  Tensor a({2}), b({3});
  ParamList one = {{"a", &a}};
  ParamList two = {{"a", &a}, {"b", &b}};
  AdamState st(one);
  EXPECT_THROW(adam_step(st, two), ContractError);
  ParamList swapped = {{"b", &b}};
  EXPECT_THROW(adam_step(st, swapped), ContractError);
}

TEST(Dropout, IdentityCases) {
  Tape<float> tape;
  auto x = tape.constant(Vec{1, 2, 3, 4});
  Rng rng(1);
  EXPECT_EQ(dropout(x, 0.0, rng, true).id, x.id);
  EXPECT_EQ(dropout(x, 0.2, rng, false).id, x.id);
  EXPECT_THROW(dropout(x, 1.0, rng, true), ContractError);
}

TEST(Dropout, SeededMaskIsReproducibleAndScaled) {
  Tape<float> tape;
  auto x = tape.constant(Vec(64, 1.0f));
  Rng r1(42), r2(42);
  auto a = dropout(x, 0.2, r1, true);
  auto b = dropout(x, 0.2, r2, true);
  EXPECT_EQ(a.value(), b.value());
  int zeros = 0;
  for (float v : a.value()) {
    if (v == 0.0f) ++zeros;
    else EXPECT_FLOAT_EQ(v, 1.25f);
  }
  EXPECT_GT(zeros, 0);
  EXPECT_LT(zeros, 64);
}

TEST(ParamFileFormat, RoundTripsBlocksAndAdamState) {
  Rng rng(2);
  BiLstmParams enc(3, 2);
  enc.init(rng);
  ParamList ps;
  enc.collect(ps, "enc");
  AdamState st(ps);
  for (auto& [n, t] : ps)
    for (auto& g : t->grad) g = 0.1f;
  adam_step(st, ps);
  const auto bytes = write_params("tam", 77, ps, &st);
  EXPECT_EQ(bytes.substr(0, 6), std::string("TPNET\x01", 6));
  auto f = read_params(bytes);
  EXPECT_EQ(f.variant, "tam");
  EXPECT_EQ(f.seed, 77u);
  ASSERT_TRUE(f.adam.has_value());
  EXPECT_EQ(*f.adam, st);

  BiLstmParams other(3, 2);
  ParamList ops;
  other.collect(ops, "enc");
  load_params(f, ops);
  EXPECT_EQ(other.fwd.W, enc.fwd.W);
  EXPECT_EQ(other.bwd.b, enc.bwd.b);

  EXPECT_THROW(read_params(bytes.substr(0, bytes.size() - 3)), InputError);
  EXPECT_THROW(read_params("TPNEX" + bytes.substr(5)), InputError);
  BiLstmParams wrong(4, 2);
  ParamList wps;
  wrong.collect(wps, "enc");
  EXPECT_THROW(load_params(f, wps), InputError);
}
