#include "ccchain/hash.hpp"

#include <openssl/evp.h>

#include <cstring>

#include "ccchain/error.hpp"

namespace ccchain {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteSpan bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (Byte b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

template <std::size_t N>
FixedBytes<N> from_hex(std::string_view hex) {
  if (hex.size() != 2 * N) {
    throw Error(ErrorCode::Parse, "expected " + std::to_string(2 * N) +
                                      " hex characters, got " + std::to_string(hex.size()));
  }
  FixedBytes<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::Parse, "invalid hex string '" + std::string(hex) + "'");
    }
    out.bytes[i] = static_cast<Byte>((hi << 4) | lo);
  }
  return out;
}

template Hash32 from_hex<32>(std::string_view);
template Nonce16 from_hex<16>(std::string_view);

Hash32 sha256(ByteSpan data) {
  Hash32 out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw Error(ErrorCode::Encoding, "SHA-256 digest failed");
  }
  return out;
}

Hash32 sha256(std::string_view data) {
  return sha256(ByteSpan(reinterpret_cast<const Byte*>(data.data()), data.size()));
}

Hash32 hash_pair(const Hash32& left, const Hash32& right) {
  std::array<Byte, 64> buf;
  std::memcpy(buf.data(), left.data(), 32);
  std::memcpy(buf.data() + 32, right.data(), 32);
  return sha256(ByteSpan(buf));
}

}  // namespace ccchain
