#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tpid/error.hpp"
#include "tpid/nn/tensor.hpp"

namespace tpid::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment buffers are aligned with the ParamList they were created for.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<float>> m, v;

  AdamState() = default;
  AdamState(const ParamList& params, AdamConfig cfg = {}) : config(cfg) {
    for (auto& [name, t] : params) {
      m.emplace_back(t->numel(), 0.0f);
      v.emplace_back(t->numel(), 0.0f);
    }
  }

  bool operator==(const AdamState& o) const { return step == o.step && m == o.m && v == o.v; }
};

// One bias-corrected Adam update from the gradients held in the tensors.
inline void adam_step(AdamState& st, const ParamList& params) {
  if (st.m.size() != params.size() || st.v.size() != params.size())
    throw ContractError("adam_step: state has " + std::to_string(st.m.size()) + " buffers for " +
                        std::to_string(params.size()) + " parameters");
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto* t = params[k].second;
    if (st.m[k].size() != t->numel() || st.v[k].size() != t->numel() || t->grad.size() != t->numel())
      throw ContractError("adam_step: shape mismatch for parameter '" + params[k].first + "'");
  }
  ++st.step;
  const auto& c = st.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(st.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& t = *params[k].second;
    auto& m = st.m[k];
    auto& v = st.v[k];
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const double g = t.grad[i];
      const double mi = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      const double vi = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      t.data[i] = static_cast<float>(t.data[i] - c.lr * mhat / (std::sqrt(vhat) + c.eps));
    }
  }
}

}  // namespace tpid::nn
