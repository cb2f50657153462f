#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stratlab/puzzle/coinbase.hpp"

namespace stratlab::stratum {

using puzzle::Hash32;

// Decoded messages keep unrecognized top-level JSON keys in `extras` so a
// relay can mutate payloads it does not fully model and re-encode them.

struct Subscribe {
    int64_t id = 0;
    std::vector<std::string> capabilities;
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const Subscribe&, const Subscribe&) = default;
};

struct SubscribeResult {
    int64_t id = 0;
    std::vector<std::pair<std::string, std::string>> subscriptions;
    Bytes extranonce1;
    size_t extranonce2_size = 4;
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const SubscribeResult&, const SubscribeResult&) = default;
};

struct Authorize {
    int64_t id = 0;
    std::string username;  // account.minerID
    std::string password;  // carried, never interpreted
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const Authorize&, const Authorize&) = default;
};

struct SetDifficulty {
    double difficulty = 1;
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const SetDifficulty&, const SetDifficulty&) = default;
};

struct Notify {
    std::string job_id;
    Hash32 prev_hash{};
    Bytes coinbase1;
    Bytes coinbase2;
    std::vector<Hash32> merkle_branches;
    uint32_t version = 0;
    uint32_t nbits = 0;
    uint32_t ntime = 0;
    bool clean_jobs = false;
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const Notify&, const Notify&) = default;
};

struct Submit {
    int64_t id = 0;
    std::string username;
    std::string job_id;
    uint32_t ntime = 0;
    uint32_t nonce = 0;
    Bytes extranonce2;
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const Submit&, const Submit&) = default;
};

struct StatusResult {
    int64_t id = 0;
    bool accepted = false;
    std::optional<std::pair<int, std::string>> error;
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const StatusResult&, const StatusResult&) = default;
};

struct MiningEncrypted {
    Bytes ciphertext;
    Bytes nonce;
    /// Direction context, not serialized: true only for the miner's secure
    /// hashrate report.
    bool from_miner = false;
    nlohmann::json extras = nlohmann::json::object();
    friend bool operator==(const MiningEncrypted& a, const MiningEncrypted& b) {
        return a.ciphertext == b.ciphertext && a.nonce == b.nonce && a.extras == b.extras;
    }
};

/// Forward-compatibility passthrough: re-encodes byte-identically.
struct Unknown {
    std::string raw_json;  // without the trailing newline
    friend bool operator==(const Unknown&, const Unknown&) = default;
};

using StratumMessage = std::variant<Subscribe, SubscribeResult, Authorize, SetDifficulty, Notify,
                                    Submit, StatusResult, MiningEncrypted, Unknown>;

}  // namespace stratlab::stratum
