#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tpid/error.hpp"
#include "tpid/nn/autodiff.hpp"
#include "tpid/nn/tensor.hpp"
#include "tpid/rng.hpp"

namespace tpid::nn {

// Gate blocks in W (4S x in), U (4S x S) and b (4S) are ordered
// input, forget, cell, output.
struct LstmParams {
  Tensor W, U, b;

  LstmParams() = default;
  LstmParams(std::size_t input_dim, std::size_t hidden_dim)
      : W({4 * hidden_dim, input_dim}), U({4 * hidden_dim, hidden_dim}), b({4 * hidden_dim}) {
    if (input_dim == 0 || hidden_dim == 0) throw ContractError("LstmParams: dims must be positive");
  }

  std::size_t input_dim() const { return W.cols(); }
  std::size_t hidden_dim() const { return U.cols(); }

  void init(Rng& rng) {
    const double k = 1.0 / std::sqrt(static_cast<double>(hidden_dim()));
    init_uniform(W, rng, k);
    init_uniform(U, rng, k);
    init_uniform(b, rng, k);
  }

  void collect(ParamList& out, const std::string& prefix) {
    out.emplace_back(prefix + ".W", &W);
    out.emplace_back(prefix + ".U", &U);
    out.emplace_back(prefix + ".b", &b);
  }
};

struct BiLstmParams {
  LstmParams fwd, bwd;

  BiLstmParams() = default;
  BiLstmParams(std::size_t input_dim, std::size_t hidden_dim) : fwd(input_dim, hidden_dim), bwd(input_dim, hidden_dim) {}

  std::size_t input_dim() const { return fwd.input_dim(); }
  std::size_t output_dim() const { return 2 * fwd.hidden_dim(); }

  void init(Rng& rng) {
    fwd.init(rng);
    bwd.init(rng);
  }
  void collect(ParamList& out, const std::string& prefix) {
    fwd.collect(out, prefix + ".fwd");
    bwd.collect(out, prefix + ".bwd");
  }
};

// Scoring vector W_h (length 2S) and scalar bias b_h.
struct AttentionParams {
  Tensor w, b;

  AttentionParams() = default;
  explicit AttentionParams(std::size_t dim) : w({dim}), b({1}) {}

  void init(Rng& rng) {
    const double k = 1.0 / std::sqrt(static_cast<double>(w.numel()));
    init_uniform(w, rng, k);
    init_uniform(b, rng, k);
  }
  void collect(ParamList& out, const std::string& prefix) {
    out.emplace_back(prefix + ".w", &w);
    out.emplace_back(prefix + ".b", &b);
  }
};

// Single-output dense layer.
struct DenseParams {
  Tensor w, b;

  DenseParams() = default;
  explicit DenseParams(std::size_t dim) : w({dim}), b({1}) {}

  void init(Rng& rng) {
    const double k = 1.0 / std::sqrt(static_cast<double>(w.numel()));
    init_uniform(w, rng, k);
    init_uniform(b, rng, k);
  }
  void collect(ParamList& out, const std::string& prefix) {
    out.emplace_back(prefix + ".w", &w);
    out.emplace_back(prefix + ".b", &b);
  }
};

// y = W x + b with W (out x in).
struct LinearParams {
  Tensor W, b;

  LinearParams() = default;
  LinearParams(std::size_t in, std::size_t out) : W({out, in}), b({out}) {}

  void init(Rng& rng) {
    const double k = 1.0 / std::sqrt(static_cast<double>(W.cols()));
    init_uniform(W, rng, k);
    init_uniform(b, rng, k);
  }
  void collect(ParamList& out, const std::string& prefix) {
    out.emplace_back(prefix + ".W", &W);
    out.emplace_back(prefix + ".b", &b);
  }
};

// ---- tape-level layers ---------------------------------------------------------

template <class T>
std::vector<Var<T>> lstm_sequence(Tape<T>& tape, LstmParams& p, const std::vector<Var<T>>& seq, bool reverse) {
  const std::size_t S = p.hidden_dim();
  auto W = tape.param(p.W);
  auto U = tape.param(p.U);
  auto b = tape.param(p.b);
  auto h = tape.zeros(S);
  auto c = tape.zeros(S);
  std::vector<Var<T>> out(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const std::size_t t = reverse ? seq.size() - 1 - k : k;
    if (seq[t].size() != p.input_dim())
      throw ContractError("lstm: input " + std::to_string(t) + " has dim " + std::to_string(seq[t].size()) +
                          ", expected " + std::to_string(p.input_dim()));
    auto gates = add(add(matvec(W, seq[t]), matvec(U, h)), b);
    auto ig = sigmoid(slice(gates, 0, S));
    auto fg = sigmoid(slice(gates, S, S));
    auto cg = tanh(slice(gates, 2 * S, S));
    auto og = sigmoid(slice(gates, 3 * S, S));
    c = add(mul(fg, c), mul(ig, cg));
    h = mul(og, tanh(c));
    out[t] = h;
  }
  return out;
}

// cp_i = [forward h_i ; backward h_i].
template <class T>
std::vector<Var<T>> bilstm(Tape<T>& tape, BiLstmParams& p, const std::vector<Var<T>>& seq) {
  if (seq.empty()) throw ContractError("bilstm: empty sequence");
  auto f = lstm_sequence(tape, p.fwd, seq, false);
  auto r = lstm_sequence(tape, p.bwd, seq, true);
  std::vector<Var<T>> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out[i] = concat<T>({f[i], r[i]});
  return out;
}

template <class T>
struct Pooled {
  Var<T> output;
  Var<T> weights;
};

// e_j = tanh(w . h_j + b), a = softmax(e), output = sum_j a_j h_j.
template <class T>
Pooled<T> attention_pool(Tape<T>& tape, AttentionParams& p, const std::vector<Var<T>>& hs) {
  if (hs.empty()) throw ContractError("attention_pool: empty input");
  auto w = tape.param(p.w);
  auto b = tape.param(p.b);
  std::vector<Var<T>> scores;
  scores.reserve(hs.size());
  for (const auto& h : hs) scores.push_back(tanh(add(dot(w, h), b)));
  auto a = softmax(concat(scores));
  return {weighted_sum(a, hs), a};
}

template <class T>
Var<T> dense_sigmoid(Tape<T>& tape, DenseParams& p, Var<T> x) {
  if (x.size() != p.w.numel())
    throw ContractError("dense_sigmoid: input dim " + std::to_string(x.size()) + ", weights " + std::to_string(p.w.numel()));
  return sigmoid(add(dot(tape.param(p.w), x), tape.param(p.b)));
}

template <class T>
Var<T> linear(Tape<T>& tape, LinearParams& p, Var<T> x) {
  return add(matvec(tape.param(p.W), x), tape.param(p.b));
}

inline constexpr double kProbClamp = 1e-7;

// y = 1: -w_pos ln p ; y = 0: -w_neg ln(1 - p), with p clamped to [1e-7, 1 - 1e-7].
template <class T>
Var<T> weighted_bce(Var<T> p, int y, double w_pos, double w_neg) {
  auto pc = clamp(p, static_cast<T>(kProbClamp), static_cast<T>(1.0 - kProbClamp));
  if (y == 1) return scale(log(pc), static_cast<T>(-w_pos));
  return scale(log(add_scalar(scale(pc, T(-1)), T(1))), static_cast<T>(-w_neg));
}

// Inverted dropout: survivors are scaled by 1/(1-rate); identity at inference.
template <class T>
Var<T> dropout(Var<T> x, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw ContractError("dropout: rate must lie in [0, 1)");
  if (!training || rate == 0.0) return x;
  std::vector<T> mask(x.size());
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& m : mask) m = rng.bernoulli(rate) ? T(0) : keep;
  return mul(x, x.tape->constant(std::move(mask)));
}

// ---- value-level conveniences ----------------------------------------------------

using Vec = std::vector<float>;

inline std::vector<Vec> bilstm_forward(LstmParams& fwd, LstmParams& bwd, const std::vector<Vec>& seq) {
  if (seq.empty()) throw ContractError("bilstm_forward: empty sequence");
  Tape<float> tape;
  std::vector<Var<float>> xs;
  for (const auto& x : seq) xs.push_back(tape.constant(std::vector<float>(x)));
  auto f = lstm_sequence(tape, fwd, xs, false);
  auto r = lstm_sequence(tape, bwd, xs, true);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    Vec v = f[i].value();
    v.insert(v.end(), r[i].value().begin(), r[i].value().end());
    out.push_back(std::move(v));
  }
  return out;
}

struct PoolResult {
  Vec output;
  Vec weights;
};

inline PoolResult attention_pool(AttentionParams& p, const std::vector<Vec>& hs) {
  Tape<float> tape;
  std::vector<Var<float>> xs;
  for (const auto& h : hs) xs.push_back(tape.constant(std::vector<float>(h)));
  auto r = attention_pool(tape, p, xs);
  return {r.output.value(), r.weights.value()};
}

inline double dense_sigmoid(std::span<const float> w, float b, std::span<const float> x) {
  if (w.size() != x.size()) throw ContractError("dense_sigmoid: dim mismatch");
  double z = b;
  for (std::size_t i = 0; i < w.size(); ++i) z += static_cast<double>(w[i]) * x[i];
  z = std::clamp(z, -kLogitClamp, kLogitClamp);
  return 1.0 / (1.0 + std::exp(-z));
}

inline double weighted_bce(double p, int y, double w_pos, double w_neg) {
  const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return y == 1 ? -w_pos * std::log(pc) : -w_neg * std::log(1.0 - pc);
}

}  // namespace tpid::nn
