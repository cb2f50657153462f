#pragma once

#include "stratlab/stratum/message.hpp"

namespace stratlab::stratum {

/// One newline-terminated JSON-RPC line per message.
std::string encode(const StratumMessage& m);

/// Inverse of encode. Unknown methods decode to Unknown; malformed JSON
/// raises CodecError carrying the byte offset; a known method with missing
/// or ill-typed params raises CodecError naming the field.
StratumMessage decode(std::string_view line);

enum class Direction { miner_to_pool, pool_to_miner };

/// Protocol-role direction of a message. MiningEncrypted is pool-to-miner
/// except for the miner's hashrate report (flagged on the message).
Direction classify_direction(const StratumMessage& m);

std::string_view method_name(const StratumMessage& m);

}  // namespace stratlab::stratum
