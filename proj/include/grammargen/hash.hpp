#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "grammargen/error.hpp"

namespace grammargen {

/// 64-bit FNV-1a with the standard offset basis. Integers are fed as
/// little-endian bytes and strings are length-prefixed, so the digest of a
/// sequence of calls is platform independent and unambiguous.
class Fnv1a {
 public:
  static constexpr std::uint64_t kOffsetBasis = 14695981039346656037ull;
  static constexpr std::uint64_t kPrime = 1099511628211ull;

  Fnv1a& byte(std::uint8_t b) noexcept {
    state_ ^= b;
    state_ *= kPrime;
    return *this;
  }

  Fnv1a& u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
  }

  Fnv1a& str(std::string_view s) noexcept {
    u64(s.size());
    for (char c : s) byte(static_cast<std::uint8_t>(c));
    return *this;
  }

  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = kOffsetBasis;
};

inline std::uint64_t hash_string(std::string_view s) noexcept { return Fnv1a().str(s).digest(); }

/// Isomorphism-invariant digest of a labeled graph (see certificate()).
struct Certificate {
  std::uint64_t value = 0;

  auto operator<=>(const Certificate&) const = default;

  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[15 - i] = kDigits[(value >> (4 * i)) & 0xF];
    return out;
  }

  static Certificate from_hex(std::string_view text) {
    if (text.size() != 16) throw Error(ErrorKind::validation, "certificate must be 16 hex digits: " + std::string(text));
    std::uint64_t v = 0;
    for (char c : text) {
      v <<= 4;
      if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
      else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint64_t>(c - 'A' + 10);
      else throw Error(ErrorKind::validation, "invalid hex digit in certificate: " + std::string(text));
    }
    return Certificate{v};
  }
};

}  // namespace grammargen
