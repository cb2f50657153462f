#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stratlab/crypto/aead.hpp"
#include "stratlab/rng.hpp"
#include "stratlab/stratum/message.hpp"

namespace stratlab::bedrock {

/// The protected values travelling inside mining.encrypted: a list of
/// (name, value) pairs, serialized as a JSON array of two-element arrays,
/// e.g. [["difficulty",1024],["secret","<hex>"]].
using ParamList = std::vector<std::pair<std::string, nlohmann::json>>;

/// Fresh random nonce per message, drawn from the caller's stream.
stratum::MiningEncrypted encrypt_params(const crypto::Key& key, const ParamList& params, Rng& rng,
                                        bool from_miner = false);

/// Authenticates before parsing; empty optional when the ciphertext fails
/// authentication or the plaintext is not a parameter list.
std::optional<ParamList> decrypt_params(const crypto::Key& key, const stratum::MiningEncrypted& m);

}  // namespace stratlab::bedrock
