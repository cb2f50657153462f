#pragma once

#include <string_view>

#include "stratlab/crypto/aead.hpp"
#include "stratlab/puzzle/coinbase.hpp"

namespace stratlab::bedrock {

using puzzle::Hash32;

/// Per-miner puzzle secret. The pool derives it, the miner re-derives it
/// from the encrypted seed, and both write it into the coinbase before
/// hashing; nobody else can rebuild the share preimage.
struct MiningCookie {
    Hash32 value{};  // C_M
    Hash32 seed{};   // R_M
};

/// C = H²(seed ‖ username): seed bytes first, then the UTF-8 username, no
/// separator.
Hash32 derive_cookie(const Hash32& seed, std::string_view username);

/// Writes the cookie into the 32-byte previous-hash region of coinbase1;
/// every other byte is untouched. Idempotent.
puzzle::CoinbaseParts embed_cookie(puzzle::CoinbaseParts parts, const Hash32& cookie);

}  // namespace stratlab::bedrock
