#include <sodium.h>

#include <cstring>

#include "doctest.h"
#include "stratlab/crypto/nonce_scan.hpp"
#include "stratlab/crypto/sha256.hpp"
#include "stratlab/rng.hpp"

using namespace stratlab;
using namespace stratlab::crypto;

TEST_CASE("sha256 NIST vectors") {
    CHECK(to_hex(sha256({})) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    Bytes abc = to_bytes("abc");
    CHECK(to_hex(sha256(abc)) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    Bytes two = to_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq");
    CHECK(to_hex(sha256(two)) == "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("double sha256 matches the stated examples") {
    CHECK(to_hex(double_sha256({})) ==
          "5df6e0e2761359d30a8275058e299fcc0381534545f55cf43e41983f5d4c9456");
    Bytes hello = to_bytes("hello");
    CHECK(to_hex(double_sha256(hello)) ==
          "9595c9df90075148eb06860365df33584b75bff782a510c6cd4883a419833d50");
    CHECK(double_sha256({}) != sha256({}));
}

TEST_CASE("sha256 agrees with libsodium on random inputs and chunkings") {
    REQUIRE(sodium_init() >= 0);
    Rng rng(0x5eed5eedULL, "sha256-oracle");
    for (int iter = 0; iter < 200; ++iter) {
        size_t len = rng.next_below(300);
        Bytes data(len);
        rng.fill(data.data(), len);

        Digest ours = sha256(data);
        Digest theirs;
        crypto_hash_sha256(theirs.data(), data.data(), data.size());
        CHECK(ours == theirs);

        // Same input fed in random pieces through the incremental interface.
        Sha256 inc;
        size_t pos = 0;
        while (pos < len) {
            size_t take = 1 + rng.next_below(97);
            take = std::min(take, len - pos);
            inc.update(ByteSpan(data.data() + pos, take));
            pos += take;
        }
        CHECK(inc.finalize() == theirs);
    }
}

TEST_CASE("nonce scan kernels agree with direct double hashing") {
    Rng rng(42, "scan-equivalence");
    uint8_t header[80];
    rng.fill(header, sizeof(header));

    auto reference = [&](uint32_t nonce) {
        header[76] = uint8_t(nonce);
        header[77] = uint8_t(nonce >> 8);
        header[78] = uint8_t(nonce >> 16);
        header[79] = uint8_t(nonce >> 24);
        return double_sha256(ByteSpan(header, 80));
    };

    const uint32_t count = 23;
    std::vector<uint32_t> nonces(count);
    for (uint32_t i = 0; i < count; ++i) nonces[i] = rng.next_u32();
    std::vector<uint8_t> out(count * 32);
    scalar_scan()(header, nonces.data(), count, out.data());
    for (uint32_t i = 0; i < count; ++i) {
        Digest want = reference(nonces[i]);
        CHECK(std::memcmp(out.data() + i * 32, want.data(), 32) == 0);
    }

    if (ScanFn v = avx2_scan()) {
        std::vector<uint8_t> vout(count * 32);
        v(header, nonces.data(), count, vout.data());
        CHECK(vout == out);
        INFO("avx2 kernel exercised");
    } else {
        MESSAGE("avx2 kernel unavailable on this CPU; scalar path only");
    }
    CHECK(best_scan() != nullptr);
    MESSAGE("dispatch selected: ", best_scan_name());
}

TEST_CASE("scan kernels equivalent on random headers and offsets") {
    ScanFn v = avx2_scan();
    if (!v) return;
    Rng rng(7, "scan-random");
    for (int iter = 0; iter < 30; ++iter) {
        uint8_t header[76];
        rng.fill(header, sizeof(header));
        uint32_t count = 1 + uint32_t(rng.next_below(40));
        std::vector<uint32_t> nonces(count);
        for (auto& n : nonces) n = rng.next_u32();
        std::vector<uint8_t> a(count * 32), b(count * 32);
        scalar_scan()(header, nonces.data(), count, a.data());
        v(header, nonces.data(), count, b.data());
        CHECK(a == b);
    }
}
