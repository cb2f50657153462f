#pragma once

#include <string>
#include <vector>

#include "stratlab/crypto/sha256.hpp"
#include "stratlab/puzzle/coinbase.hpp"
#include "stratlab/puzzle/difficulty.hpp"

namespace stratlab::puzzle {

/// Everything a share's hash preimage is rebuilt from.
struct PuzzleInput {
    uint32_t version = 0x20000000;
    Hash32 prev_block_hash{};
    std::vector<Hash32> merkle_branches;
    uint32_t timestamp = 0;
    uint32_t nbits = 0;
    CoinbaseParts coinbase;
};

struct ShareSolution {
    uint32_t nonce = 0;
    Bytes extranonce2;
    std::string job_id;
};

/// Left fold h ← H²(h ‖ branch) in branch order, one fold per branch.
/// The hasher is injectable so tests can count invocations.
template <typename Hasher>
Hash32 merkle_root_with(const Hash32& coinbase_txid, const std::vector<Hash32>& branches,
                        Hasher&& hash) {
    Hash32 h = coinbase_txid;
    Bytes buf(64);
    for (const Hash32& b : branches) {
        std::copy(h.begin(), h.end(), buf.begin());
        std::copy(b.begin(), b.end(), buf.begin() + 32);
        h = hash(ByteSpan(buf));
    }
    return h;
}

Hash32 merkle_root(const Hash32& coinbase_txid, const std::vector<Hash32>& branches);

/// version ‖ prev hash ‖ merkle root ‖ timestamp ‖ nbits: 76 bytes, nonce appended last.
Bytes serialize_header_prefix(const PuzzleInput& p, const Hash32& root);
Bytes serialize_header(const PuzzleInput& p, const Hash32& root, uint32_t nonce);

/// Little-endian integer value of a hash, the comparison order used
/// throughout share verification.
U256 hash_to_int(const crypto::Digest& h);

Hash32 coinbase_txid(const PuzzleInput& p, ByteSpan extranonce2);

/// Header double-hash for a specific solution (coinbase rebuilt with the
/// solution's extranonce2).
crypto::Digest share_hash(const PuzzleInput& p, const ShareSolution& s);

/// H²(header) < target, with the full coinbase/merkle/header reconstruction.
bool check_share(const PuzzleInput& p, const ShareSolution& s, const Target& t);

}  // namespace stratlab::puzzle
