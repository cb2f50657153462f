#include "stratlab/bedrock/envelope.hpp"

namespace stratlab::bedrock {

using nlohmann::json;

stratum::MiningEncrypted encrypt_params(const crypto::Key& key, const ParamList& params, Rng& rng,
                                        bool from_miner) {
    json list = json::array();
    for (const auto& [name, value] : params) list.push_back(json::array({name, value}));
    std::string plain = list.dump();

    crypto::Nonce nonce;
    rng.fill(nonce.data(), nonce.size());

    stratum::MiningEncrypted m;
    m.ciphertext = crypto::seal(key, nonce, to_bytes(plain));
    m.nonce.assign(nonce.begin(), nonce.end());
    m.from_miner = from_miner;
    return m;
}

std::optional<ParamList> decrypt_params(const crypto::Key& key, const stratum::MiningEncrypted& m) {
    if (m.nonce.size() != crypto::kNonceBytes) return std::nullopt;
    crypto::Nonce nonce;
    std::copy(m.nonce.begin(), m.nonce.end(), nonce.begin());
    auto plain = crypto::open(key, nonce, ByteSpan(m.ciphertext));
    if (!plain) return std::nullopt;

    json list = json::parse(plain->begin(), plain->end(), nullptr, /*allow_exceptions=*/false);
    if (list.is_discarded() || !list.is_array()) return std::nullopt;
    ParamList out;
    for (const auto& entry : list) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string()) return std::nullopt;
        out.emplace_back(entry[0].get<std::string>(), entry[1]);
    }
    return out;
}

}  // namespace stratlab::bedrock
