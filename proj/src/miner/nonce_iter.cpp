#include "stratlab/miner/nonce_iter.hpp"

#include "stratlab/errors.hpp"

namespace stratlab::miner {

namespace {
uint32_t round_fn(uint64_t key, unsigned round, uint32_t half) {
    // splitmix-style mixer keyed by (key, round); only masked bits are used.
    uint64_t x = key ^ (uint64_t(round) << 56) ^ (uint64_t(half) * 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return uint32_t(x ^ (x >> 31));
}
}  // namespace

FeistelPermutation::FeistelPermutation(uint64_t key, unsigned domain_bits)
    : key_(key), domain_bits_(domain_bits) {
    if (domain_bits < 2 || domain_bits > 32 || domain_bits % 2 != 0)
        throw ConfigError("feistel domain bits must be even and within [2, 32]");
    half_bits_ = domain_bits / 2;
    half_mask_ = (half_bits_ == 32) ? 0xffffffffu : ((uint32_t(1) << half_bits_) - 1);
}

uint32_t FeistelPermutation::apply(uint32_t index) const {
    uint32_t left = (index >> half_bits_) & half_mask_;
    uint32_t right = index & half_mask_;
    for (unsigned r = 0; r < 4; ++r) {
        uint32_t next_left = right;
        right = (left ^ round_fn(key_, r, right)) & half_mask_;
        left = next_left;
    }
    return (left << half_bits_) | right;
}

}  // namespace stratlab::miner
