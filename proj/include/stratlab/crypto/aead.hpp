#pragma once

#include <array>
#include <optional>

#include "stratlab/bytes.hpp"

namespace stratlab::crypto {

// Authenticated secret-key encryption (XSalsa20-Poly1305 via libsodium).
// Nonces are caller-supplied so simulations stay seed-deterministic.

inline constexpr size_t kKeyBytes = 32;
inline constexpr size_t kNonceBytes = 24;

using Key = std::array<uint8_t, kKeyBytes>;
using Nonce = std::array<uint8_t, kNonceBytes>;

Bytes seal(const Key& key, const Nonce& nonce, ByteSpan plaintext);

/// Empty optional on authentication failure.
std::optional<Bytes> open(const Key& key, const Nonce& nonce, ByteSpan ciphertext);

std::string base64_encode(ByteSpan data);
Bytes base64_decode(std::string_view text);

}  // namespace stratlab::crypto
