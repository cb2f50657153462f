#include <cstring>

#include "stratlab/crypto/nonce_scan.hpp"
#include "stratlab/crypto/sha256.hpp"

namespace stratlab::crypto {

namespace {

constexpr uint32_t kInit[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                               0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

inline void store_be32(uint8_t* p, uint32_t v) {
    p[0] = uint8_t(v >> 24);
    p[1] = uint8_t(v >> 16);
    p[2] = uint8_t(v >> 8);
    p[3] = uint8_t(v);
}

// An 80-byte header spans two blocks; only the second depends on the nonce,
// so the first-block state (midstate) is compressed once per call.
void scan(const uint8_t header76[76], const uint32_t* nonces, uint32_t count, uint8_t* digests_out) {
    uint32_t midstate[8];
    std::memcpy(midstate, kInit, sizeof(midstate));
    Sha256::compress(midstate, header76);

    uint8_t tail[64];  // header bytes 64..75 + nonce + padding for an 80-byte message
    std::memset(tail, 0, sizeof(tail));
    std::memcpy(tail, header76 + 64, 12);
    tail[16] = 0x80;
    tail[62] = 0x02;  // 640 bits
    tail[63] = 0x80;

    uint8_t second[64];  // 32-byte digest + padding
    std::memset(second, 0, sizeof(second));
    second[32] = 0x80;
    second[62] = 0x01;  // 256 bits
    second[63] = 0x00;

    for (uint32_t i = 0; i < count; ++i) {
        uint32_t nonce = nonces[i];
        tail[12] = uint8_t(nonce);
        tail[13] = uint8_t(nonce >> 8);
        tail[14] = uint8_t(nonce >> 16);
        tail[15] = uint8_t(nonce >> 24);

        uint32_t st[8];
        std::memcpy(st, midstate, sizeof(st));
        Sha256::compress(st, tail);
        for (int w = 0; w < 8; ++w) store_be32(second + 4 * w, st[w]);

        uint32_t st2[8];
        std::memcpy(st2, kInit, sizeof(st2));
        Sha256::compress(st2, second);
        uint8_t* out = digests_out + size_t(i) * 32;
        for (int w = 0; w < 8; ++w) store_be32(out + 4 * w, st2[w]);
    }
}

}  // namespace

ScanFn scalar_scan() { return &scan; }

}  // namespace stratlab::crypto
