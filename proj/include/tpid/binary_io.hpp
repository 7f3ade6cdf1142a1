#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "tpid/error.hpp"

namespace tpid::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(v); }
  void f32s(const float* data, std::size_t n) {
    const auto* p = reinterpret_cast<const char*>(data);
    buf_.insert(buf_.end(), p, p + n * sizeof(float));
  }
  // u16 length prefix followed by the raw bytes.
  void str16(std::string_view s) {
    if (s.size() > UINT16_MAX) throw ContractError("string too long for u16 length prefix: " + std::string(s.substr(0, 32)));
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s);
  }

  const std::string& data() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  template <class T>
  void put(T v) {
    char tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    buf_.append(tmp, sizeof(T));
  }
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string context) : data_(data), context_(std::move(context)) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return get<float>(); }
  void f32s(float* out, std::size_t n) {
    auto s = bytes(n * sizeof(float));
    std::memcpy(out, s.data(), s.size());
  }
  std::string str16() {
    const auto n = u16();
    return std::string(bytes(n));
  }

  bool at_end() const { return pos_ == data_.size(); }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw InputError(context_ + ": truncated at byte " + std::to_string(pos_) + " (need " + std::to_string(n) +
                       ", have " + std::to_string(data_.size() - pos_) + ")");
  }
  template <class T>
  T get() {
    auto s = bytes(sizeof(T));
    T v;
    std::memcpy(&v, s.data(), sizeof(T));
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  std::string context_;
};

inline std::string read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw InputError("cannot open file: " + path);
  std::string out;
  char chunk[1 << 16];
  std::size_t n;
  while ((n = std::fread(chunk, 1, sizeof(chunk), f)) > 0) out.append(chunk, n);
  std::fclose(f);
  return out;
}

inline void write_file(const std::string& path, std::string_view contents) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw InputError("cannot write file: " + path);
  const bool ok = std::fwrite(contents.data(), 1, contents.size(), f) == contents.size();
  std::fclose(f);
  if (!ok) throw InputError("short write: " + path);
}

}  // namespace tpid::io
