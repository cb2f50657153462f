#pragma once

#include <cstdint>
#include <optional>

namespace stratlab::miner {

/// Keyed bijection over a 2w-bit domain: a 4-round balanced Feistel network
/// on w-bit halves. Any round function gives a permutation, so bijectivity
/// holds for every key; tests enumerate reduced domains to prove it.
class FeistelPermutation {
public:
    /// domain_bits must be even, in [2, 32]. Production uses 32.
    FeistelPermutation(uint64_t key, unsigned domain_bits = 32);

    uint32_t apply(uint32_t index) const;  // index < 2^domain_bits
    uint64_t domain_size() const { return uint64_t(1) << domain_bits_; }

private:
    uint64_t key_;
    unsigned domain_bits_;
    unsigned half_bits_;
    uint32_t half_mask_;
};

/// Position cursor over a FeistelPermutation: visits every nonce exactly
/// once, then reports exhaustion.
class NoncePermutation {
public:
    NoncePermutation(uint64_t key, unsigned domain_bits = 32)
        : perm_(key, domain_bits), cursor_(0) {}

    bool has_next() const { return cursor_ < perm_.domain_size(); }
    uint32_t next() { return perm_.apply(uint32_t(cursor_++)); }
    uint64_t remaining() const { return perm_.domain_size() - cursor_; }

private:
    FeistelPermutation perm_;
    uint64_t cursor_;
};

}  // namespace stratlab::miner
