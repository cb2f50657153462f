#include "stratlab/puzzle/coinbase.hpp"

#include <cstring>

#include "stratlab/errors.hpp"

namespace stratlab::puzzle {

namespace {
void put_u64_le(Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
}  // namespace

CoinbaseParts make_coinbase_template(ByteSpan script_prefix, ByteSpan script_suffix,
                                     ByteSpan extranonce1, size_t extranonce2_size,
                                     uint64_t reward_satoshis) {
    size_t script_len = script_prefix.size() + extranonce1.size() + extranonce2_size + script_suffix.size();
    if (script_len > 0xfc) throw ConfigError("coinbase script too long for a 1-byte length");

    CoinbaseParts parts;
    parts.extranonce1.assign(extranonce1.begin(), extranonce1.end());
    parts.extranonce2_size = extranonce2_size;

    Bytes& c1 = parts.coinbase1;
    put_u32_le(c1, 1);                       // tx version
    c1.push_back(0x01);                      // input count
    c1.insert(c1.end(), kPrevHashSize, 0);   // previous tx hash, unused in a coinbase
    put_u32_le(c1, 0xffffffffu);             // previous tx index
    c1.push_back(static_cast<uint8_t>(script_len));
    append(c1, script_prefix);

    Bytes& c2 = parts.coinbase2;
    append(c2, script_suffix);
    put_u32_le(c2, 0xffffffffu);  // sequence
    c2.push_back(0x01);           // output count
    put_u64_le(c2, reward_satoshis);
    // Standard pay-to-pubkey-hash locking script, placeholder key hash.
    const uint8_t p2pkh[] = {0x19, 0x76, 0xa9, 0x14, 0xde, 0xad, 0xbe, 0xef, 0xde, 0xad, 0xbe,
                             0xef, 0xde, 0xad, 0xbe, 0xef, 0xde, 0xad, 0xbe, 0xef, 0xde, 0xad,
                             0xbe, 0xef, 0x88, 0xac};
    c2.insert(c2.end(), p2pkh, p2pkh + sizeof(p2pkh));
    put_u32_le(c2, 0);  // locktime
    return parts;
}

Bytes serialize_coinbase(const CoinbaseParts& parts) {
    return serialize_coinbase(parts, parts.extranonce2);
}

Bytes serialize_coinbase(const CoinbaseParts& parts, ByteSpan extranonce2) {
    if (extranonce2.size() != parts.extranonce2_size)
        throw DomainError("extranonce2 length does not match the session size");
    Bytes out;
    out.reserve(parts.coinbase1.size() + parts.extranonce1.size() + extranonce2.size() +
                parts.coinbase2.size());
    append(out, parts.coinbase1);
    append(out, parts.extranonce1);
    append(out, extranonce2);
    append(out, parts.coinbase2);
    return out;
}

void validate_coinbase(const CoinbaseParts& parts) {
    if (parts.coinbase1.size() < kPrevHashOffset + kPrevHashSize + 4 + 1)
        throw CodecError("coinbase1 shorter than the fixed input fields");
    ByteSpan c1(parts.coinbase1);
    if (c1[4] != 0x01) throw CodecError("coinbase input count must be 1");
    if (get_u32_le(c1, kPrevHashOffset + kPrevHashSize) != 0xffffffffu)
        throw CodecError("coinbase previous index must be 0xffffffff");
    size_t script_len = c1[kPrevHashOffset + kPrevHashSize + 4];
    size_t prefix_len = parts.coinbase1.size() - (kPrevHashOffset + kPrevHashSize + 4 + 1);
    size_t in_script = prefix_len + parts.extranonce1.size() + parts.extranonce2_size;
    if (in_script > script_len) throw CodecError("extranonces overflow the declared script length");
    size_t suffix_len = script_len - in_script;
    // coinbase2 must carry the script tail plus sequence, outputs and locktime.
    if (parts.coinbase2.size() < suffix_len + 4 + 1 + 8 + 1 + 4)
        throw CodecError("coinbase2 too short for script tail and outputs");
    if (get_u32_le(ByteSpan(parts.coinbase2), suffix_len) != 0xffffffffu)
        throw CodecError("coinbase sequence must be 0xffffffff");
}

ByteSpan cookie_region(const CoinbaseParts& parts) {
    if (parts.coinbase1.size() < kPrevHashOffset + kPrevHashSize)
        throw CodecError("coinbase1 shorter than the fixed input fields");
    return ByteSpan(parts.coinbase1).subspan(kPrevHashOffset, kPrevHashSize);
}

void write_cookie_region(CoinbaseParts& parts, const Hash32& value) {
    if (parts.coinbase1.size() < kPrevHashOffset + kPrevHashSize)
        throw CodecError("coinbase1 shorter than the fixed input fields");
    std::memcpy(parts.coinbase1.data() + kPrevHashOffset, value.data(), kPrevHashSize);
}

}  // namespace stratlab::puzzle
