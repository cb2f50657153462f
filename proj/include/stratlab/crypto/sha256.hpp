#pragma once

#include <array>
#include <cstdint>

#include "stratlab/bytes.hpp"

namespace stratlab::crypto {

using Digest = std::array<uint8_t, 32>;

/// Incremental SHA-256 (FIPS 180-4). Scalar reference implementation; the
/// vector nonce-scan kernels are equivalence-tested against it.
class Sha256 {
public:
    Sha256() { reset(); }
    void reset();
    void update(ByteSpan data);
    Digest finalize();

    /// Compression function over one 64-byte block, exposed for the midstate
    /// optimization used by the header scan kernels.
    static void compress(uint32_t state[8], const uint8_t block[64]);

private:
    uint32_t state_[8];
    uint64_t total_len_ = 0;
    uint8_t buf_[64];
    size_t buf_len_ = 0;
};

Digest sha256(ByteSpan data);
Digest double_sha256(ByteSpan data);

}  // namespace stratlab::crypto
