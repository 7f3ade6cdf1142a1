#pragma once

// Scalar double-precision re-implementations used as oracles.

#include <cmath>
#include <vector>

#include "tpid/nn/layers.hpp"

namespace tpid::testkit {

// Scalar per-gate LSTM written independently of the tape, in double.
inline std::vector<std::vector<double>> reference_lstm(const nn::LstmParams& p, const std::vector<nn::Vec>& seq, bool reverse) {
  const std::size_t S = p.hidden_dim(), I = p.input_dim();
  std::vector<double> h(S, 0.0), c(S, 0.0);
  std::vector<std::vector<double>> out(seq.size());
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const std::size_t t = reverse ? seq.size() - 1 - k : k;
    std::vector<double> pre(4 * S);
    for (std::size_t r = 0; r < 4 * S; ++r) {
      double z = p.b.data[r];
      for (std::size_t j = 0; j < I; ++j) z += p.W.data[r * I + j] * seq[t][j];
      for (std::size_t j = 0; j < S; ++j) z += p.U.data[r * S + j] * h[j];
      pre[r] = z;
    }
    for (std::size_t s = 0; s < S; ++s) {
      const double ig = sig(pre[s]), fg = sig(pre[S + s]), cg = std::tanh(pre[2 * S + s]), og = sig(pre[3 * S + s]);
      c[s] = fg * c[s] + ig * cg;
      h[s] = og * std::tanh(c[s]);
    }
    out[t] = h;
  }
  return out;
}

inline std::vector<double> reference_bilstm_step(const std::vector<std::vector<double>>& f, const std::vector<std::vector<double>>& r, std::size_t i) {
  std::vector<double> v = f[i];
  v.insert(v.end(), r[i].begin(), r[i].end());
  return v;
}

// tanh-scored softmax pooling.
inline std::vector<double> reference_attention(const nn::AttentionParams& a, const std::vector<std::vector<double>>& hs) {
  std::vector<double> e;
  for (const auto& h : hs) {
    double z = a.b.data[0];
    for (std::size_t j = 0; j < h.size(); ++j) z += a.w.data[j] * h[j];
    e.push_back(std::exp(std::tanh(z)));
  }
  double sum = 0;
  for (double x : e) sum += x;
  std::vector<double> out(hs.front().size(), 0.0);
  for (std::size_t k = 0; k < hs.size(); ++k)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += e[k] / sum * hs[k][j];
  return out;
}

}  // namespace tpid::testkit
