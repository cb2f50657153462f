#pragma once

#include <array>
#include <cstdint>

#include "stratlab/bytes.hpp"

namespace stratlab::puzzle {

using Hash32 = std::array<uint8_t, 32>;

// Stratum splits the serialized coinbase transaction into
//   coinbase1 ‖ extranonce1 ‖ extranonce2 ‖ coinbase2
// where coinbase1 covers version, input count, the unused previous-tx-hash
// (bytes 5..36, hosting the mining cookie when enabled), the 0xffffffff
// previous index, the script length byte and a script prefix. extranonce1/2
// sit inside the script; coinbase2 carries the script tail, sequence,
// outputs and locktime.

inline constexpr size_t kPrevHashOffset = 4 + 1;
inline constexpr size_t kPrevHashSize = 32;

struct CoinbaseParts {
    Bytes coinbase1;
    Bytes extranonce1;
    Bytes extranonce2;  // may be empty in a template; length must equal extranonce2_size when set
    Bytes coinbase2;
    size_t extranonce2_size = 4;
};

/// Pool-side template with the conventional field contents. The script is
/// script_prefix ‖ extranonce1 ‖ extranonce2 ‖ script_suffix.
CoinbaseParts make_coinbase_template(ByteSpan script_prefix, ByteSpan script_suffix,
                                     ByteSpan extranonce1, size_t extranonce2_size,
                                     uint64_t reward_satoshis);

Bytes serialize_coinbase(const CoinbaseParts& parts);
Bytes serialize_coinbase(const CoinbaseParts& parts, ByteSpan extranonce2);

/// Throws CodecError unless the concatenation parses as a coinbase
/// transaction with the extranonces inside the input script.
void validate_coinbase(const CoinbaseParts& parts);

/// The 32-byte previous-tx-hash region inside coinbase1.
ByteSpan cookie_region(const CoinbaseParts& parts);
void write_cookie_region(CoinbaseParts& parts, const Hash32& value);

}  // namespace stratlab::puzzle
