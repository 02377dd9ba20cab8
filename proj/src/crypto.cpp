// SPDX-License-Identifier: Apache-2.0
#include "qsl/crypto.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace qsl {

std::array<uint8_t, 32> sha256(ByteSpan data) {
  std::array<uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
  return out;
}

Bytes hash_keystream(ByteSpan prefix, size_t len) {
  Bytes out;
  out.reserve(len);
  Bytes block_input(prefix.begin(), prefix.end());
  block_input.resize(prefix.size() + 4);
  for (uint32_t i = 0; out.size() < len; ++i) {
    block_input[prefix.size() + 0] = uint8_t(i >> 24);
    block_input[prefix.size() + 1] = uint8_t(i >> 16);
    block_input[prefix.size() + 2] = uint8_t(i >> 8);
    block_input[prefix.size() + 3] = uint8_t(i);
    auto block = sha256(block_input);
    size_t take = std::min(block.size(), len - out.size());
    out.insert(out.end(), block.begin(), block.begin() + take);
  }
  return out;
}

namespace {

uint64_t mulmod(uint64_t a, uint64_t b) {
  return uint64_t((unsigned __int128)a * b % kDhPrime);
}

uint64_t powmod(uint64_t base, uint64_t exp) {
  uint64_t acc = 1;
  base %= kDhPrime;
  while (exp) {
    if (exp & 1) acc = mulmod(acc, base);
    base = mulmod(base, base);
    exp >>= 1;
  }
  return acc;
}

void check_priv(uint64_t priv) {
  if (priv < 2 || priv > kDhPrime - 2)
    throw std::invalid_argument("dh private key outside [2, p-2]");
}

}  // namespace

uint64_t dh_pub(uint64_t priv) {
  check_priv(priv);
  return powmod(kDhGenerator, priv);
}

uint64_t dh_shared(uint64_t priv, uint64_t peer_pub) {
  check_priv(priv);
  if (peer_pub == 0 || peer_pub >= kDhPrime)
    throw std::invalid_argument("dh peer public value outside group");
  return powmod(peer_pub, priv);
}

DhKeypair dh_keypair(std::mt19937_64& rng) {
  // Rejection sampling keeps the draw exactly uniform over [2, p-2].
  const uint64_t range = kDhPrime - 3;  // count of values in [2, p-2]
  const uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  uint64_t u;
  do {
    u = rng();
  } while (u >= limit);
  uint64_t priv = 2 + u % range;
  return {priv, dh_pub(priv)};
}

DhKeypair dh_keypair(uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return dh_keypair(rng);
}

}  // namespace qsl
