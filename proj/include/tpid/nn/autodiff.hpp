#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tpid/error.hpp"
#include "tpid/nn/tensor.hpp"

namespace tpid::nn {

// Reverse-mode tape over dense arrays. Scalars are arrays of length one and
// matrices are row-major with cols > 1. Parameters are f32 Tensors; the tape
// computes in T (float in production, double for finite-difference oracles)
// and accumulates gradients back into Tensor::grad.
template <class T>
class Tape;

template <class T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  bool valid() const { return tape != nullptr; }
  const std::vector<T>& value() const { return tape->node(id).value; }
  std::size_t size() const { return value().size(); }
  T operator[](std::size_t i) const { return value()[i]; }
  T scalar() const { return value().at(0); }
};

inline constexpr double kLogitClamp = 30.0;

template <class T>
class Tape {
 public:
  using value_type = T;
  using Backward = std::function<void(Tape&, std::size_t)>;

  struct Node {
    std::vector<T> value;
    std::vector<T> grad;
    std::size_t rows = 0;
    std::size_t cols = 1;
    Backward backward;
    Tensor* param = nullptr;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Node& node(std::size_t id) { return nodes_[id]; }
  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  std::vector<T>& grad(std::size_t id) { return nodes_[id].grad; }

  // Records a vector-valued node.
  Var<T> push(std::vector<T> value, Backward bw) {
    Node n;
    n.rows = value.size();
    n.value = std::move(value);
    n.backward = std::move(bw);
    nodes_.push_back(std::move(n));
    return Var<T>{this, nodes_.size() - 1};
  }

  Var<T> constant(std::vector<T> v) {
    return push(std::move(v), nullptr);
  }

  template <class U>
  Var<T> constant(std::span<const U> v) {
    return constant(std::vector<T>(v.begin(), v.end()));
  }

  Var<T> zeros(std::size_t n) { return constant(std::vector<T>(n, T(0))); }

  // Leaf bound to a parameter tensor; repeated calls return the same node.
  Var<T> param(Tensor& t) {
    if (auto it = param_ids_.find(&t); it != param_ids_.end()) return Var<T>{this, it->second};
    Node n;
    n.value.assign(t.data.begin(), t.data.end());
    n.rows = t.rows();
    n.cols = t.shape.size() < 2 ? 1 : t.cols();
    n.param = &t;
    nodes_.push_back(std::move(n));
    param_ids_[&t] = nodes_.size() - 1;
    return Var<T>{this, nodes_.size() - 1};
  }

  // Fills every node's gradient with d(loss)/d(node) and adds parameter
  // gradients into their tensors.
  void backward(Var<T> loss) {
    if (!loss.valid() || loss.tape != this || nodes_.empty() || loss.id >= nodes_.size())
      throw StateError("backward: no forward pass recorded on this tape");
    if (nodes_[loss.id].value.size() != 1) throw ContractError("backward: loss must be a scalar");
    for (auto& n : nodes_) n.grad.assign(n.value.size(), T(0));
    nodes_[loss.id].grad[0] = T(1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      if (nodes_[i].backward) nodes_[i].backward(*this, i);
    }
    for (auto& n : nodes_) {
      if (!n.param) continue;
      for (std::size_t k = 0; k < n.grad.size(); ++k) n.param->grad[k] += static_cast<float>(n.grad[k]);
    }
  }

 private:
  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, std::size_t> param_ids_;
};

namespace detail {

template <class T>
void same_size(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.tape != b.tape) throw ContractError(std::string(op) + ": operands on different tapes");
  if (a.size() != b.size())
    throw ContractError(std::string(op) + ": size mismatch " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

template <class T>
void need_scalar(const Var<T>& a, const char* op) {
  if (a.size() != 1) throw ContractError(std::string(op) + ": expected scalar operand");
}

template <class T, class F, class DF>
Var<T> unary(Var<T> a, F f, DF df) {
  const auto& x = a.value();
  std::vector<T> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return a.tape->push(std::move(y), [a, df](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& x = tp.node(a.id).value;
    const auto& y = tp.node(self).value;
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
  });
}

template <class T>
T clamp_logit(T x) {
  return std::clamp(x, T(-kLogitClamp), T(kLogitClamp));
}

}  // namespace detail

template <class T>
Var<T> add(Var<T> a, Var<T> b) {
  detail::same_size(a, b, "add");
  std::vector<T> y(a.value());
  const auto& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return a.tape->push(std::move(y), [a, b](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    auto& gb = tp.grad(b.id);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
  });
}

template <class T>
Var<T> sub(Var<T> a, Var<T> b) {
  detail::same_size(a, b, "sub");
  std::vector<T> y(a.value());
  const auto& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  return a.tape->push(std::move(y), [a, b](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    auto& gb = tp.grad(b.id);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
  });
}

// Element-wise product.
template <class T>
Var<T> mul(Var<T> a, Var<T> b) {
  detail::same_size(a, b, "mul");
  const auto& av = a.value();
  const auto& bv = b.value();
  std::vector<T> y(av.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
  return a.tape->push(std::move(y), [a, b](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& av = tp.node(a.id).value;
    const auto& bv = tp.node(b.id).value;
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    auto& gb = tp.grad(b.id);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
  });
}

// Vector times scalar variable.
template <class T>
Var<T> scale(Var<T> a, Var<T> s) {
  detail::need_scalar(s, "scale");
  const T k = s.scalar();
  std::vector<T> y(a.value());
  for (auto& v : y) v *= k;
  return a.tape->push(std::move(y), [a, s](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& av = tp.node(a.id).value;
    const T k = tp.node(s.id).value[0];
    auto& ga = tp.grad(a.id);
    T acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * k;
      acc += g[i] * av[i];
    }
    tp.grad(s.id)[0] += acc;
  });
}

template <class T>
Var<T> scale(Var<T> a, T k) {
  std::vector<T> y(a.value());
  for (auto& v : y) v *= k;
  return a.tape->push(std::move(y), [a, k](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * k;
  });
}

template <class T>
Var<T> add_scalar(Var<T> a, T k) {
  std::vector<T> y(a.value());
  for (auto& v : y) v += k;
  return a.tape->push(std::move(y), [a](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

// W (rows x cols) times x (cols).
template <class T>
Var<T> matvec(Var<T> w, Var<T> x) {
  const auto& wn = w.tape->node(w.id);
  const std::size_t r = wn.rows, c = wn.cols;
  if (wn.value.size() != r * c || x.size() != c)
    throw ContractError("matvec: shape mismatch, W is " + std::to_string(r) + "x" + std::to_string(c) + ", x has " +
                        std::to_string(x.size()));
  const auto& wv = wn.value;
  const auto& xv = x.value();
  std::vector<T> y(r, T(0));
  for (std::size_t i = 0; i < r; ++i) {
    T acc = 0;
    const T* row = wv.data() + i * c;
    for (std::size_t j = 0; j < c; ++j) acc += row[j] * xv[j];
    y[i] = acc;
  }
  return w.tape->push(std::move(y), [w, x, r, c](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& wv = tp.node(w.id).value;
    const auto& xv = tp.node(x.id).value;
    auto& gw = tp.grad(w.id);
    auto& gx = tp.grad(x.id);
    for (std::size_t i = 0; i < r; ++i) {
      const T gi = g[i];
      if (gi == T(0)) continue;
      T* grow = gw.data() + i * c;
      const T* row = wv.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) {
        grow[j] += gi * xv[j];
        gx[j] += gi * row[j];
      }
    }
  });
}

template <class T>
Var<T> concat(const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw ContractError("concat: no operands");
  std::vector<T> y;
  for (const auto& p : parts) y.insert(y.end(), p.value().begin(), p.value().end());
  Tape<T>* tape = parts.front().tape;
  return tape->push(std::move(y), [parts](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    std::size_t off = 0;
    for (const auto& p : parts) {
      auto& gp = tp.grad(p.id);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[off + i];
      off += gp.size();
    }
  });
}

template <class T>
Var<T> slice(Var<T> a, std::size_t offset, std::size_t len) {
  if (offset + len > a.size()) throw ContractError("slice: range out of bounds");
  std::vector<T> y(a.value().begin() + static_cast<std::ptrdiff_t>(offset),
                   a.value().begin() + static_cast<std::ptrdiff_t>(offset + len));
  return a.tape->push(std::move(y), [a, offset](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
  });
}

template <class T>
Var<T> dot(Var<T> a, Var<T> b) {
  detail::same_size(a, b, "dot");
  const auto& av = a.value();
  const auto& bv = b.value();
  T acc = 0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  return a.tape->push({acc}, [a, b](Tape<T>& tp, std::size_t self) {
    const T g = tp.grad(self)[0];
    const auto& av = tp.node(a.id).value;
    const auto& bv = tp.node(b.id).value;
    auto& ga = tp.grad(a.id);
    auto& gb = tp.grad(b.id);
    for (std::size_t i = 0; i < av.size(); ++i) {
      ga[i] += g * bv[i];
      gb[i] += g * av[i];
    }
  });
}

template <class T>
Var<T> sum(Var<T> a) {
  T acc = 0;
  for (T v : a.value()) acc += v;
  return a.tape->push({acc}, [a](Tape<T>& tp, std::size_t self) {
    const T g = tp.grad(self)[0];
    for (auto& v : tp.grad(a.id)) v += g;
  });
}

// Euclidean norm; the gradient at the origin is taken as zero.
template <class T>
Var<T> norm2(Var<T> a) {
  T acc = 0;
  for (T v : a.value()) acc += v * v;
  const T n = std::sqrt(acc);
  return a.tape->push({n}, [a](Tape<T>& tp, std::size_t self) {
    const T n = tp.node(self).value[0];
    if (n == T(0)) return;
    const T g = tp.grad(self)[0];
    const auto& av = tp.node(a.id).value;
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < av.size(); ++i) ga[i] += g * av[i] / n;
  });
}

// Scalar quotient a / b.
template <class T>
Var<T> div(Var<T> a, Var<T> b) {
  detail::need_scalar(a, "div");
  detail::need_scalar(b, "div");
  const T q = a.scalar() / b.scalar();
  return a.tape->push({q}, [a, b](Tape<T>& tp, std::size_t self) {
    const T g = tp.grad(self)[0];
    const T bv = tp.node(b.id).value[0];
    const T q = tp.node(self).value[0];
    tp.grad(a.id)[0] += g / bv;
    tp.grad(b.id)[0] -= g * q / bv;
  });
}

// max(a, floor) for a scalar; gradient flows only when a > floor.
template <class T>
Var<T> max_floor(Var<T> a, T floor) {
  detail::need_scalar(a, "max_floor");
  const T v = a.scalar();
  const bool pass = v > floor;
  return a.tape->push({pass ? v : floor}, [a, pass](Tape<T>& tp, std::size_t self) {
    if (pass) tp.grad(a.id)[0] += tp.grad(self)[0];
  });
}

template <class T>
Var<T> clamp(Var<T> a, T lo, T hi) {
  return detail::unary(
      a, [lo, hi](T x) { return std::clamp(x, lo, hi); },
      [lo, hi](T x, T) { return (x > lo && x < hi) ? T(1) : T(0); });
}

template <class T>
Var<T> sigmoid(Var<T> a) {
  return detail::unary(
      a,
      [](T x) {
        // Saturated outputs stay strictly inside (0, 1) in either precision.
        const T y = T(1) / (T(1) + std::exp(-detail::clamp_logit(x)));
        return std::min(y, std::nextafter(T(1), T(0)));
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <class T>
Var<T> tanh(Var<T> a) {
  return detail::unary(
      a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <class T>
Var<T> exp(Var<T> a) {
  return detail::unary(
      a, [](T x) { return std::exp(detail::clamp_logit(x)); }, [](T, T y) { return y; });
}

template <class T>
Var<T> log(Var<T> a) {
  return detail::unary(
      a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

// Numerically stable softmax over a vector of logits.
template <class T>
Var<T> softmax(Var<T> a) {
  const auto& x = a.value();
  if (x.empty()) throw ContractError("softmax: empty input");
  const T m = *std::max_element(x.begin(), x.end());
  std::vector<T> y(x.size());
  T z = 0;
  for (std::size_t i = 0; i < x.size(); ++i) z += (y[i] = std::exp(x[i] - m));
  for (auto& v : y) v /= z;
  return a.tape->push(std::move(y), [a](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& y = tp.node(self).value;
    T gy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) gy += g[i] * y[i];
    auto& ga = tp.grad(a.id);
    for (std::size_t i = 0; i < y.size(); ++i) ga[i] += y[i] * (g[i] - gy);
  });
}

// sum_j weights[j] * items[j]; weights is a vector with one entry per item.
template <class T>
Var<T> weighted_sum(Var<T> weights, const std::vector<Var<T>>& items) {
  if (items.empty() || weights.size() != items.size()) throw ContractError("weighted_sum: weights/items mismatch");
  const std::size_t d = items.front().size();
  std::vector<T> y(d, T(0));
  const auto& w = weights.value();
  for (std::size_t j = 0; j < items.size(); ++j) {
    const auto& v = items[j].value();
    if (v.size() != d) throw ContractError("weighted_sum: items differ in size");
    for (std::size_t i = 0; i < d; ++i) y[i] += w[j] * v[i];
  }
  return weights.tape->push(std::move(y), [weights, items](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& w = tp.node(weights.id).value;
    auto& gw = tp.grad(weights.id);
    for (std::size_t j = 0; j < items.size(); ++j) {
      const auto& v = tp.node(items[j].id).value;
      auto& gv = tp.grad(items[j].id);
      T acc = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        acc += g[i] * v[i];
        gv[i] += g[i] * w[j];
      }
      gw[j] += acc;
    }
  });
}

// Element-wise mean of equally sized vectors.
template <class T>
Var<T> mean(const std::vector<Var<T>>& items) {
  if (items.empty()) throw ContractError("mean: no operands");
  const std::size_t d = items.front().size();
  std::vector<T> y(d, T(0));
  for (const auto& it : items) {
    if (it.size() != d) throw ContractError("mean: operands differ in size");
    const auto& v = it.value();
    for (std::size_t i = 0; i < d; ++i) y[i] += v[i];
  }
  const T inv = T(1) / static_cast<T>(items.size());
  for (auto& v : y) v *= inv;
  return items.front().tape->push(std::move(y), [items, inv](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    for (const auto& it : items) {
      auto& gi = tp.grad(it.id);
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * inv;
    }
  });
}

// Sum of scalars.
template <class T>
Var<T> add_n(const std::vector<Var<T>>& items) {
  if (items.empty()) throw ContractError("add_n: no operands");
  const std::size_t d = items.front().size();
  std::vector<T> y(d, T(0));
  for (const auto& it : items) {
    if (it.size() != d) throw ContractError("add_n: operands differ in size");
    const auto& v = it.value();
    for (std::size_t i = 0; i < d; ++i) y[i] += v[i];
  }
  return items.front().tape->push(std::move(y), [items](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    for (const auto& it : items) {
      auto& gi = tp.grad(it.id);
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
    }
  });
}

}  // namespace tpid::nn
