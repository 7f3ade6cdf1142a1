#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpid/binary_io.hpp"
#include "tpid/error.hpp"
#include "tpid/nn/adam.hpp"
#include "tpid/nn/tensor.hpp"

namespace tpid::nn {

inline constexpr std::string_view kNetMagic{"TPNET\x01", 6};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Decoded parameter file: variant tag, seed, named blocks, optional Adam state.
struct ParamFile {
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<NamedTensor> blocks;
  std::optional<AdamState> adam;
};

// Layout (little-endian): magic "TPNET\x01", u32 version=1, u16+bytes variant tag,
// u64 seed, u32 block count, then per block u16+bytes name, u32 rank, u64 dims,
// f32 data; finally u8 has_adam and, if set, u64 step, f64 lr/beta1/beta2/eps and
// the m then v buffers per block.
inline std::string write_params(std::string_view variant, std::uint64_t seed, const ParamList& params,
                                const AdamState* adam = nullptr) {
  io::ByteWriter w;
  w.bytes(kNetMagic);
  w.u32(1);
  w.str16(variant);
  w.u64(seed);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    w.str16(name);
    w.u32(static_cast<std::uint32_t>(t->shape.size()));
    for (auto d : t->shape) w.u64(d);
    w.f32s(t->data.data(), t->numel());
  }
  if (adam) {
    if (adam->m.size() != params.size()) throw ContractError("write_params: Adam state does not match parameters");
    w.u8(1);
    w.u64(adam->step);
    for (double x : {adam->config.lr, adam->config.beta1, adam->config.beta2, adam->config.eps}) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof(bits));
      w.u64(bits);
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      w.f32s(adam->m[k].data(), adam->m[k].size());
      w.f32s(adam->v[k].data(), adam->v[k].size());
    }
  } else {
    w.u8(0);
  }
  return w.take();
}

inline ParamFile read_params(std::string_view bytes) {
  io::ByteReader r(bytes, "checkpoint");
  if (bytes.size() < kNetMagic.size() || r.bytes(kNetMagic.size()) != kNetMagic)
    throw InputError("checkpoint: bad magic");
  const auto version = r.u32();
  if (version != 1) throw InputError("checkpoint: unsupported version " + std::to_string(version));
  ParamFile f;
  f.variant = r.str16();
  f.seed = r.u64();
  const auto count = r.u32();
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedTensor nt;
    nt.name = r.str16();
    const auto rank = r.u32();
    if (rank > 8) throw InputError("checkpoint: implausible rank for '" + nt.name + "'");
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) d = static_cast<std::size_t>(r.u64());
    nt.tensor = Tensor(dims);
    if (nt.tensor.numel() * 4 > r.remaining()) throw InputError("checkpoint: truncated block '" + nt.name + "'");
    r.f32s(nt.tensor.data.data(), nt.tensor.numel());
    f.blocks.push_back(std::move(nt));
  }
  if (r.u8() == 1) {
    AdamState st;
    st.step = r.u64();
    double* cfg[] = {&st.config.lr, &st.config.beta1, &st.config.beta2, &st.config.eps};
    for (double* x : cfg) {
      const auto bits = r.u64();
      std::memcpy(x, &bits, sizeof(bits));
    }
    for (const auto& b : f.blocks) {
      st.m.emplace_back(b.tensor.numel());
      r.f32s(st.m.back().data(), b.tensor.numel());
      st.v.emplace_back(b.tensor.numel());
      r.f32s(st.v.back().data(), b.tensor.numel());
    }
    f.adam = std::move(st);
  }
  if (!r.at_end()) throw InputError("checkpoint: trailing bytes");
  return f;
}

// Copies decoded blocks into a model's tensors; names and shapes must match exactly.
inline void load_params(const ParamFile& f, const ParamList& params) {
  if (f.blocks.size() != params.size())
    throw InputError("checkpoint: has " + std::to_string(f.blocks.size()) + " blocks, model expects " +
                     std::to_string(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& [name, t] = params[k];
    const auto& b = f.blocks[k];
    if (b.name != name) throw InputError("checkpoint: block " + std::to_string(k) + " is '" + b.name + "', expected '" + name + "'");
    if (b.tensor.shape != t->shape) throw InputError("checkpoint: shape mismatch for '" + name + "'");
    t->data = b.tensor.data;
  }
}

}  // namespace tpid::nn
