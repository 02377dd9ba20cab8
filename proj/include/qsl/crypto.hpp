// SPDX-License-Identifier: Apache-2.0
//
// Toy cryptographic primitives for the lab transport. Nothing in this file
// is secure; the point is the *visibility structure*: who can derive which
// keystream from which wire-visible values.
#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "qsl/bytes.hpp"

namespace qsl {

std::array<uint8_t, 32> sha256(ByteSpan data);

// SHA-256 counter-mode keystream: block_i = SHA-256(prefix || be32(i)),
// concatenated and truncated to len.
Bytes hash_keystream(ByteSpan prefix, size_t len);

// Fixed toy group: p = 2^61 - 1 (prime), g = 3.
inline constexpr uint64_t kDhPrime = (uint64_t(1) << 61) - 1;
inline constexpr uint64_t kDhGenerator = 3;

struct DhKeypair {
  uint64_t priv = 0;
  uint64_t pub = 0;
};

// priv must lie in [2, p-2]; throws std::invalid_argument otherwise.
uint64_t dh_pub(uint64_t priv);
uint64_t dh_shared(uint64_t priv, uint64_t peer_pub);

DhKeypair dh_keypair(std::mt19937_64& rng);
DhKeypair dh_keypair(uint64_t rng_seed);

}  // namespace qsl
