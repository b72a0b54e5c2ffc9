#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace ccchain {

using Byte = std::uint8_t;
using ByteSpan = std::span<const Byte>;

// Fixed-width opaque byte strings. Equality and ordering are bytewise.
template <std::size_t N>
struct FixedBytes {
  std::array<Byte, N> bytes{};

  static constexpr std::size_t size() { return N; }
  const Byte* data() const { return bytes.data(); }
  Byte* data() { return bytes.data(); }
  ByteSpan span() const { return {bytes.data(), N}; }
  bool is_zero() const {
    for (Byte b : bytes) {
      if (b != 0) return false;
    }
    return true;
  }

  auto operator<=>(const FixedBytes&) const = default;
};

using Hash32 = FixedBytes<32>;
using Nonce16 = FixedBytes<16>;

// Lowercase hex; from_hex accepts either case and throws Error(Parse) on
// malformed input or a width mismatch.
std::string to_hex(ByteSpan bytes);
template <std::size_t N>
std::string to_hex(const FixedBytes<N>& v) {
  return to_hex(v.span());
}

template <std::size_t N>
FixedBytes<N> from_hex(std::string_view hex);

extern template Hash32 from_hex<32>(std::string_view);
extern template Nonce16 from_hex<16>(std::string_view);

inline Hash32 hash_from_hex(std::string_view hex) { return from_hex<32>(hex); }

Hash32 sha256(ByteSpan data);
Hash32 sha256(std::string_view data);
// H(left || right), the Merkle interior-node function.
Hash32 hash_pair(const Hash32& left, const Hash32& right);

struct Hash32Hasher {
  std::size_t operator()(const Hash32& h) const noexcept {
    std::size_t out = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) {
      out = (out << 8) | h.bytes[i];
    }
    return out;
  }
};

}  // namespace ccchain
