// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace qsl {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// Simulated clock ticks, microseconds.
using Micros = int64_t;

// Network-layer address of an interface. 0 is never a valid address.
using Addr = uint32_t;

// Big-endian serializer.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) {
    buf_.push_back(uint8_t(v >> 8));
    buf_.push_back(uint8_t(v));
  }
  void u32(uint32_t v) {
    u16(uint16_t(v >> 16));
    u16(uint16_t(v));
  }
  void u64(uint64_t v) {
    u32(uint32_t(v >> 32));
    u32(uint32_t(v));
  }
  void raw(ByteSpan s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void raw(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  size_t size() const { return buf_.size(); }
  Bytes take() { return std::move(buf_); }
  const Bytes& peek() const { return buf_; }

 private:
  Bytes buf_;
};

// Big-endian cursor with a sticky failure flag. Reads past the end return
// zeroes and clear ok().
class ByteReader {
 public:
  explicit ByteReader(ByteSpan s) : s_(s) {}

  uint8_t u8() {
    if (!need(1)) return 0;
    return s_[pos_++];
  }
  uint16_t u16() { return uint16_t(u8()) << 8 | u8(); }
  uint32_t u32() { return uint32_t(u16()) << 16 | u16(); }
  uint64_t u64() { return uint64_t(u32()) << 32 | u32(); }
  Bytes bytes(size_t n) {
    if (!need(n)) return {};
    Bytes out(s_.begin() + pos_, s_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  bool fill(void* dst, size_t n) {
    if (!need(n)) return false;
    std::memcpy(dst, s_.data() + pos_, n);
    pos_ += n;
    return true;
  }

  bool ok() const { return ok_; }
  size_t remaining() const { return ok_ ? s_.size() - pos_ : 0; }
  // True when the whole input was consumed without error.
  bool done() const { return ok_ && pos_ == s_.size(); }

 private:
  bool need(size_t n) {
    if (!ok_ || s_.size() - pos_ < n) {
      ok_ = false;
      return false;
    }
    return true;
  }

  ByteSpan s_;
  size_t pos_ = 0;
  bool ok_ = true;
};

inline std::string to_hex(ByteSpan s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(s.size() * 2);
  for (uint8_t b : s) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

}  // namespace qsl
