#pragma once

// Central finite-difference oracle for tape gradients. The analytic pass runs
// in f32 (the production path); the numeric pass re-evaluates the same
// forward definition in f64 around each perturbed f32 parameter.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tpid/nn/autodiff.hpp"
#include "tpid/nn/tensor.hpp"

namespace tpid::testkit {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Relative error with a small absolute floor so entries that are zero up to
// rounding do not blow up the ratio.
inline double rel_error(double a, double n, double floor = 1e-4) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

// `build` is a generic callable: (nn::Tape<T>&) -> nn::Var<T> scalar loss.
// max_per_param == 0 checks every element.
template <class Build>
GradCheckReport grad_check(const nn::ParamList& params, Build&& build, double h = 1e-3, std::size_t max_per_param = 0) {
  nn::zero_grads(params);
  {
    nn::Tape<float> tape;
    auto loss = build(tape);
    tape.backward(loss);
  }
  GradCheckReport rep;
  auto eval = [&] {
    nn::Tape<double> tape;
    return build(tape).scalar();
  };
  for (const auto& [name, t] : params) {
    const std::size_t n = t->numel();
    const std::size_t stride = (max_per_param == 0 || n <= max_per_param) ? 1 : n / max_per_param;
    for (std::size_t i = 0; i < n; i += stride) {
      const float orig = t->data[i];
      const float up = static_cast<float>(orig + h);
      const float down = static_cast<float>(orig - h);
      t->data[i] = up;
      const double lp = eval();
      t->data[i] = down;
      const double lm = eval();
      t->data[i] = orig;
      const double numeric = (lp - lm) / (static_cast<double>(up) - static_cast<double>(down));
      const double analytic = t->grad[i];
      const double e = rel_error(analytic, numeric);
      ++rep.checked;
      if (e > rep.max_rel_error) {
        rep.max_rel_error = e;
        rep.worst_param = name;
        rep.worst_index = i;
        rep.worst_analytic = analytic;
        rep.worst_numeric = numeric;
      }
    }
  }
  return rep;
}

}  // namespace tpid::testkit
