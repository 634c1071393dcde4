#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "commons/support/bytes.hpp"

namespace commons {

/// Canonical binary encoding: fixed-width big-endian integers,
/// length-prefixed byte strings, map entries in key order. Two equal
/// values always encode to identical bytes, so digests over encoded
/// state are stable across processes and platforms.
class CanonicalWriter {
 public:
  void u8(std::uint8_t x) { buf_.push_back(x); }

  void u16(std::uint16_t x) {
    buf_.push_back(static_cast<Byte>(x >> 8));
    buf_.push_back(static_cast<Byte>(x));
  }

  void u32(std::uint32_t x) {
    for (int i = 3; i >= 0; --i) buf_.push_back(static_cast<Byte>(x >> (8 * i)));
  }

  void u64(std::uint64_t x) {
    for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<Byte>(x >> (8 * i)));
  }

  void i64(std::int64_t x) { u64(static_cast<std::uint64_t>(x)); }

  void boolean(bool b) { u8(b ? 1 : 0); }

  /// IEEE-754 bit pattern; canonicalizes all NaNs to one quiet NaN.
  void f64(double x) {
    std::uint64_t bits;
    if (x != x) {
      bits = 0x7ff8000000000000ULL;
    } else {
      std::memcpy(&bits, &x, sizeof bits);
    }
    u64(bits);
  }

  void bytes(const Bytes& b) {
    u32(static_cast<std::uint32_t>(b.size()));
    buf_.insert(buf_.end(), b.begin(), b.end());
  }

  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  void digest(const Digest32& d) { buf_.insert(buf_.end(), d.v.begin(), d.v.end()); }

  void raw(const Bytes& b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  void raw(const Byte* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }

  const Bytes& data() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

/// Thrown on truncated or malformed canonical input.
struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CanonicalReader {
 public:
  explicit CanonicalReader(const Bytes& data) : data_(data) {}

  std::uint8_t u8() { return take(1)[0]; }

  std::uint16_t u16() {
    auto p = take(2);
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
  }

  std::uint32_t u32() {
    auto p = take(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x = (x << 8) | p[i];
    return x;
  }

  std::uint64_t u64() {
    auto p = take(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x = (x << 8) | p[i];
    return x;
  }

  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

  bool boolean() {
    auto b = u8();
    if (b > 1) throw DecodeError("bad boolean");
    return b == 1;
  }

  double f64() {
    std::uint64_t bits = u64();
    double x;
    std::memcpy(&x, &bits, sizeof x);
    return x;
  }

  Bytes bytes() {
    auto n = u32();
    auto p = take(n);
    return Bytes(p, p + n);
  }

  std::string str() {
    auto n = u32();
    auto p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }

  Digest32 digest() {
    auto p = take(32);
    Digest32 d;
    std::memcpy(d.v.data(), p, 32);
    return d;
  }

  void raw(Byte* out, std::size_t n) {
    auto p = take(n);
    std::memcpy(out, p, n);
  }

  bool exhausted() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  const Byte* take(size_t n) {
    if (pos_ + n > data_.size()) throw DecodeError("truncated input");
    const Byte* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  const Bytes& data_;
  size_t pos_ = 0;
};

}  // namespace commons
