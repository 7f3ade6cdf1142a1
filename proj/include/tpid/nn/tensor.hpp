#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tpid/error.hpp"
#include "tpid/rng.hpp"

namespace tpid::nn {

// Dense row-major f32 buffer with an accumulated gradient of the same shape.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;
  std::vector<float> grad;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
    const auto n = numel_of(shape);
    data.assign(n, 0.0f);
    grad.assign(n, 0.0f);
  }

  static std::size_t numel_of(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0f); }

  bool operator==(const Tensor& o) const { return shape == o.shape && data == o.data; }
};

inline void init_uniform(Tensor& t, Rng& rng, double bound) {
  for (auto& v : t.data) v = static_cast<float>(rng.uniform(-bound, bound));
}

// Named, ordered view over a model's tensors; the order defines the
// serialization and optimizer-state layout.
using ParamList = std::vector<std::pair<std::string, Tensor*>>;

inline void zero_grads(const ParamList& ps) {
  for (auto& [name, t] : ps) t->zero_grad();
}

inline void zero_params(const ParamList& ps) {
  for (auto& [name, t] : ps) std::fill(t->data.begin(), t->data.end(), 0.0f);
}

inline std::size_t param_count(const ParamList& ps) {
  std::size_t n = 0;
  for (auto& [name, t] : ps) n += t->numel();
  return n;
}

inline bool all_finite(const ParamList& ps) {
  for (auto& [name, t] : ps)
    for (float v : t->data)
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace tpid::nn
