#include "stratlab/puzzle/puzzle.hpp"

#include "stratlab/errors.hpp"

namespace stratlab::puzzle {

Hash32 merkle_root(const Hash32& coinbase_txid, const std::vector<Hash32>& branches) {
    return merkle_root_with(coinbase_txid, branches,
                            [](ByteSpan data) { return crypto::double_sha256(data); });
}

Bytes serialize_header_prefix(const PuzzleInput& p, const Hash32& root) {
    Bytes out;
    out.reserve(76);
    put_u32_le(out, p.version);
    out.insert(out.end(), p.prev_block_hash.begin(), p.prev_block_hash.end());
    out.insert(out.end(), root.begin(), root.end());
    put_u32_le(out, p.timestamp);
    put_u32_le(out, p.nbits);
    return out;
}

Bytes serialize_header(const PuzzleInput& p, const Hash32& root, uint32_t nonce) {
    Bytes out = serialize_header_prefix(p, root);
    put_u32_le(out, nonce);
    return out;
}

U256 hash_to_int(const crypto::Digest& h) { return U256::from_le_bytes(ByteSpan(h.data(), h.size())); }

Hash32 coinbase_txid(const PuzzleInput& p, ByteSpan extranonce2) {
    Bytes tx = serialize_coinbase(p.coinbase, extranonce2);
    return crypto::double_sha256(tx);
}

crypto::Digest share_hash(const PuzzleInput& p, const ShareSolution& s) {
    if (s.extranonce2.size() != p.coinbase.extranonce2_size)
        throw DomainError("malformed share: extranonce2 length mismatch");
    Hash32 txid = coinbase_txid(p, s.extranonce2);
    Hash32 root = merkle_root(txid, p.merkle_branches);
    Bytes header = serialize_header(p, root, s.nonce);
    return crypto::double_sha256(header);
}

bool check_share(const PuzzleInput& p, const ShareSolution& s, const Target& t) {
    return hash_to_int(share_hash(p, s)) < t.value;
}

}  // namespace stratlab::puzzle
