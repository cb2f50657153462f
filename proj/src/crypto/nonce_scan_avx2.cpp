// AVX2 8-lane variant of the header scan kernel. Built with -mavx2 in its own
// translation unit; callers must go through the runtime dispatch in
// nonce_scan_dispatch.cpp.

#include "stratlab/crypto/nonce_scan.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cstring>

#include "stratlab/crypto/sha256.hpp"

namespace stratlab::crypto {

namespace {

constexpr uint32_t kInit[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                               0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

constexpr uint32_t kK[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline __m256i vadd(__m256i a, __m256i b) { return _mm256_add_epi32(a, b); }
inline __m256i vxor(__m256i a, __m256i b) { return _mm256_xor_si256(a, b); }
inline __m256i vand(__m256i a, __m256i b) { return _mm256_and_si256(a, b); }

inline __m256i rotr(__m256i x, int n) {
    return _mm256_or_si256(_mm256_srli_epi32(x, n), _mm256_slli_epi32(x, 32 - n));
}
inline __m256i small_sigma0(__m256i x) {
    return vxor(vxor(rotr(x, 7), rotr(x, 18)), _mm256_srli_epi32(x, 3));
}
inline __m256i small_sigma1(__m256i x) {
    return vxor(vxor(rotr(x, 17), rotr(x, 19)), _mm256_srli_epi32(x, 10));
}
inline __m256i big_sigma0(__m256i x) { return vxor(vxor(rotr(x, 2), rotr(x, 13)), rotr(x, 22)); }
inline __m256i big_sigma1(__m256i x) { return vxor(vxor(rotr(x, 6), rotr(x, 11)), rotr(x, 25)); }
inline __m256i choose(__m256i e, __m256i f, __m256i g) {
    return vxor(vand(e, f), _mm256_andnot_si256(e, g));
}
inline __m256i majority(__m256i a, __m256i b, __m256i c) {
    return vxor(vxor(vand(a, b), vand(a, c)), vand(b, c));
}

void compress8(__m256i s[8], const __m256i blk[16]) {
    __m256i w[64];
    for (int t = 0; t < 16; ++t) w[t] = blk[t];
    for (int t = 16; t < 64; ++t)
        w[t] = vadd(vadd(w[t - 16], small_sigma0(w[t - 15])), vadd(w[t - 7], small_sigma1(w[t - 2])));

    __m256i a = s[0], b = s[1], c = s[2], d = s[3], e = s[4], f = s[5], g = s[6], h = s[7];
    for (int t = 0; t < 64; ++t) {
        __m256i t1 = vadd(vadd(h, big_sigma1(e)),
                          vadd(choose(e, f, g), vadd(_mm256_set1_epi32(int(kK[t])), w[t])));
        __m256i t2 = vadd(big_sigma0(a), majority(a, b, c));
        h = g;
        g = f;
        f = e;
        e = vadd(d, t1);
        d = c;
        c = b;
        b = a;
        a = vadd(t1, t2);
    }
    s[0] = vadd(s[0], a);
    s[1] = vadd(s[1], b);
    s[2] = vadd(s[2], c);
    s[3] = vadd(s[3], d);
    s[4] = vadd(s[4], e);
    s[5] = vadd(s[5], f);
    s[6] = vadd(s[6], g);
    s[7] = vadd(s[7], h);
}

inline uint32_t load_be32(const uint8_t* p) {
    return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | uint32_t(p[3]);
}
inline uint32_t bswap32(uint32_t v) { return __builtin_bswap32(v); }

void scan(const uint8_t header76[76], const uint32_t* nonces, uint32_t count, uint8_t* digests_out) {
    uint32_t midstate[8];
    std::memcpy(midstate, kInit, sizeof(midstate));
    Sha256::compress(midstate, header76);

    const uint32_t tail_w0 = load_be32(header76 + 64);
    const uint32_t tail_w1 = load_be32(header76 + 68);
    const uint32_t tail_w2 = load_be32(header76 + 72);

    uint32_t done = 0;
    while (done < count) {
        uint32_t lanes = count - done < 8 ? count - done : 8;

        // First hash, second block: only the nonce word varies per lane.
        __m256i blk[16];
        blk[0] = _mm256_set1_epi32(int(tail_w0));
        blk[1] = _mm256_set1_epi32(int(tail_w1));
        blk[2] = _mm256_set1_epi32(int(tail_w2));
        alignas(32) uint32_t nw[8];
        for (uint32_t i = 0; i < 8; ++i) nw[i] = bswap32(nonces[done + (i < lanes ? i : 0)]);
        blk[3] = _mm256_load_si256(reinterpret_cast<const __m256i*>(nw));
        blk[4] = _mm256_set1_epi32(int(0x80000000u));
        for (int t = 5; t < 15; ++t) blk[t] = _mm256_setzero_si256();
        blk[15] = _mm256_set1_epi32(640);

        __m256i s[8];
        for (int i = 0; i < 8; ++i) s[i] = _mm256_set1_epi32(int(midstate[i]));
        compress8(s, blk);

        // Second hash: the 8 state words are the message block.
        __m256i blk2[16];
        for (int i = 0; i < 8; ++i) blk2[i] = s[i];
        blk2[8] = _mm256_set1_epi32(int(0x80000000u));
        for (int t = 9; t < 15; ++t) blk2[t] = _mm256_setzero_si256();
        blk2[15] = _mm256_set1_epi32(256);

        __m256i s2[8];
        for (int i = 0; i < 8; ++i) s2[i] = _mm256_set1_epi32(int(kInit[i]));
        compress8(s2, blk2);

        alignas(32) uint32_t words[8][8];
        for (int wI = 0; wI < 8; ++wI)
            _mm256_store_si256(reinterpret_cast<__m256i*>(words[wI]), s2[wI]);
        for (uint32_t lane = 0; lane < lanes; ++lane) {
            uint8_t* out = digests_out + size_t(done + lane) * 32;
            for (int wI = 0; wI < 8; ++wI) {
                uint32_t v = words[wI][lane];
                out[4 * wI + 0] = uint8_t(v >> 24);
                out[4 * wI + 1] = uint8_t(v >> 16);
                out[4 * wI + 2] = uint8_t(v >> 8);
                out[4 * wI + 3] = uint8_t(v);
            }
        }
        done += lanes;
    }
}

}  // namespace

ScanFn avx2_scan() {
    return __builtin_cpu_supports("avx2") ? &scan : nullptr;
}

}  // namespace stratlab::crypto

#else

namespace stratlab::crypto {
ScanFn avx2_scan() { return nullptr; }
}  // namespace stratlab::crypto

#endif
