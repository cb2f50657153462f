#pragma once

#include <cstdint>
#include <string_view>

namespace stratlab::crypto {

// Double-SHA-256 of (header76 ‖ nonce_le) for a batch of nonces, the hot
// loop of real-hash mining. The scalar kernel is the reference; vector
// kernels must produce byte-identical digests (enforced by tests and by a
// one-shot self-check on first dispatch).
//
// digests_out receives count * 32 bytes, digest i for nonces[i]. Nonce
// batches are arbitrary: random-permutation iteration scans scattered
// values.
using ScanFn = void (*)(const uint8_t header76[76], const uint32_t* nonces, uint32_t count,
                        uint8_t* digests_out);

ScanFn scalar_scan();

/// AVX2 8-lane kernel, or nullptr when unsupported by the build or the CPU.
ScanFn avx2_scan();

/// Fastest kernel supported at runtime.
ScanFn best_scan();
std::string_view best_scan_name();

}  // namespace stratlab::crypto
