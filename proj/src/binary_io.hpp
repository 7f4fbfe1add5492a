#pragma once

// Little-endian encode/decode helpers, independent of host byte order.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "pecann/data.hpp"

namespace pecann::detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t decode_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Sequential reader that tracks the byte offset for error messages.
class ByteReader {
 public:
  ByteReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  std::uint64_t offset() const noexcept { return offset_; }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  std::uint32_t u32() {
    unsigned char b[4];
    read(b, 4);
    return decode_u32(b);
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  void expect_magic(const char (&magic)[5]) {
    char b[4];
    read(reinterpret_cast<unsigned char*>(b), 4);
    if (std::memcmp(b, magic, 4) != 0) fail("bad magic, expected \"" + std::string(magic) + "\"", offset_ - 4);
  }

  [[noreturn]] void fail(const std::string& msg, std::uint64_t at) const {
    throw FormatError(what_ + ": " + msg, at);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, offset_); }

 private:
  void read(unsigned char* dst, std::size_t len) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in_.gcount()) != len) fail("truncated file");
    offset_ += len;
  }

  std::istream& in_;
  std::string what_;
  std::uint64_t offset_ = 0;
};

}  // namespace pecann::detail
