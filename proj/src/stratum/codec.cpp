#include "stratlab/stratum/codec.hpp"

#include "stratlab/crypto/aead.hpp"
#include "stratlab/errors.hpp"

namespace stratlab::stratum {

using nlohmann::json;

namespace {

constexpr const char* kSubscribe = "mining.subscribe";
constexpr const char* kAuthorize = "mining.authorize";
constexpr const char* kSetDifficulty = "mining.set_difficulty";
constexpr const char* kNotify = "mining.notify";
constexpr const char* kSubmit = "mining.submit";
constexpr const char* kEncrypted = "mining.encrypted";

json id_json(int64_t id) { return json(id); }

void merge_extras(json& obj, const json& extras) {
    for (auto it = extras.begin(); it != extras.end(); ++it) obj[it.key()] = it.value();
}

/// Top-level keys other than the JSON-RPC triple are preserved verbatim.
json collect_extras(const json& obj) {
    json extras = json::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (it.key() == "id" || it.key() == "method" || it.key() == "params" ||
            it.key() == "result" || it.key() == "error")
            continue;
        extras[it.key()] = it.value();
    }
    return extras;
}

std::string finish(json obj, const json& extras) {
    merge_extras(obj, extras);
    return obj.dump() + "\n";
}

const json& param_at(const json& params, size_t i, const char* method, const char* field) {
    if (!params.is_array() || params.size() <= i)
        throw CodecError(std::string(method) + ": missing param '" + field + "'");
    return params[i];
}

std::string str_param(const json& params, size_t i, const char* method, const char* field) {
    const json& v = param_at(params, i, method, field);
    if (!v.is_string())
        throw CodecError(std::string(method) + ": param '" + field + "' must be a string");
    return v.get<std::string>();
}

uint32_t hex32_param(const json& params, size_t i, const char* method, const char* field) {
    std::string s = str_param(params, i, method, field);
    if (s.size() != 8 || !is_hex(s))
        throw CodecError(std::string(method) + ": param '" + field + "' must be 8 hex chars");
    return parse_hex32(s);
}

Hash32 hash_param(const std::string& s, const char* method, const char* field) {
    if (s.size() != 64 || !is_hex(s))
        throw CodecError(std::string(method) + ": param '" + field + "' must be 64 hex chars");
    Bytes b = from_hex(s);
    Hash32 h;
    std::copy(b.begin(), b.end(), h.begin());
    return h;
}

int64_t require_id(const json& obj, const char* method) {
    if (!obj.contains("id") || !obj["id"].is_number_integer())
        throw CodecError(std::string(method) + ": missing integer 'id'");
    return obj["id"].get<int64_t>();
}

struct Encoder {
    std::string operator()(const Subscribe& m) const {
        json params = json::array();
        for (const auto& c : m.capabilities) params.push_back(c);
        return finish({{"id", id_json(m.id)}, {"method", kSubscribe}, {"params", params}}, m.extras);
    }
    std::string operator()(const SubscribeResult& m) const {
        json subs = json::array();
        for (const auto& [meth, tag] : m.subscriptions) subs.push_back(json::array({meth, tag}));
        json result = json::array({subs, to_hex(m.extranonce1), m.extranonce2_size});
        return finish({{"id", id_json(m.id)}, {"result", result}, {"error", nullptr}}, m.extras);
    }
    std::string operator()(const Authorize& m) const {
        return finish({{"id", id_json(m.id)},
                       {"method", kAuthorize},
                       {"params", json::array({m.username, m.password})}},
                      m.extras);
    }
    std::string operator()(const SetDifficulty& m) const {
        return finish(
            {{"id", nullptr}, {"method", kSetDifficulty}, {"params", json::array({m.difficulty})}},
            m.extras);
    }
    std::string operator()(const Notify& m) const {
        json branches = json::array();
        for (const auto& b : m.merkle_branches) branches.push_back(to_hex(b));
        json params = json::array({m.job_id, to_hex(m.prev_hash), to_hex(m.coinbase1),
                                   to_hex(m.coinbase2), branches, hex32(m.version), hex32(m.nbits),
                                   hex32(m.ntime), m.clean_jobs});
        return finish({{"id", nullptr}, {"method", kNotify}, {"params", params}}, m.extras);
    }
    std::string operator()(const Submit& m) const {
        json params = json::array({m.username, m.job_id, hex32(m.ntime), hex32(m.nonce),
                                   to_hex(m.extranonce2)});
        return finish({{"id", id_json(m.id)}, {"method", kSubmit}, {"params", params}}, m.extras);
    }
    std::string operator()(const StatusResult& m) const {
        json err = nullptr;
        if (m.error) err = json::array({m.error->first, m.error->second, nullptr});
        return finish({{"id", id_json(m.id)}, {"result", m.accepted}, {"error", err}}, m.extras);
    }
    std::string operator()(const MiningEncrypted& m) const {
        json params = json::array(
            {crypto::base64_encode(m.ciphertext), crypto::base64_encode(m.nonce)});
        return finish({{"id", nullptr}, {"method", kEncrypted}, {"params", params}}, m.extras);
    }
    std::string operator()(const Unknown& m) const { return m.raw_json + "\n"; }
};

}  // namespace

std::string encode(const StratumMessage& m) { return std::visit(Encoder{}, m); }

StratumMessage decode(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw CodecError("JSON parse error: " + std::string(e.what()), long(e.byte));
    }
    if (!obj.is_object()) throw CodecError("top-level JSON value must be an object");

    if (obj.contains("method")) {
        if (!obj["method"].is_string()) throw CodecError("'method' must be a string");
        std::string method = obj["method"].get<std::string>();
        const json params = obj.value("params", json::array());

        if (method == kSubscribe) {
            Subscribe m;
            m.id = require_id(obj, kSubscribe);
            if (!params.is_array()) throw CodecError("mining.subscribe: 'params' must be an array");
            for (const auto& p : params) {
                if (!p.is_string()) throw CodecError("mining.subscribe: capabilities must be strings");
                m.capabilities.push_back(p.get<std::string>());
            }
            m.extras = collect_extras(obj);
            return m;
        }
        if (method == kAuthorize) {
            Authorize m;
            m.id = require_id(obj, kAuthorize);
            m.username = str_param(params, 0, kAuthorize, "username");
            m.password = str_param(params, 1, kAuthorize, "password");
            m.extras = collect_extras(obj);
            return m;
        }
        if (method == kSetDifficulty) {
            const json& d = param_at(params, 0, kSetDifficulty, "difficulty");
            if (!d.is_number()) throw CodecError("mining.set_difficulty: param 'difficulty' must be a number");
            SetDifficulty m;
            m.difficulty = d.get<double>();
            m.extras = collect_extras(obj);
            return m;
        }
        if (method == kNotify) {
            Notify m;
            m.job_id = str_param(params, 0, kNotify, "job_id");
            m.prev_hash = hash_param(str_param(params, 1, kNotify, "prev_hash"), kNotify, "prev_hash");
            std::string c1 = str_param(params, 2, kNotify, "coinbase1");
            std::string c2 = str_param(params, 3, kNotify, "coinbase2");
            if (!is_hex(c1) || !is_hex(c2)) throw CodecError("mining.notify: coinbase fields must be hex");
            m.coinbase1 = from_hex(c1);
            m.coinbase2 = from_hex(c2);
            const json& branches = param_at(params, 4, kNotify, "merkle_branches");
            if (!branches.is_array()) throw CodecError("mining.notify: param 'merkle_branches' must be an array");
            for (const auto& b : branches) {
                if (!b.is_string()) throw CodecError("mining.notify: merkle branch must be a string");
                m.merkle_branches.push_back(hash_param(b.get<std::string>(), kNotify, "merkle_branch"));
            }
            m.version = hex32_param(params, 5, kNotify, "version");
            m.nbits = hex32_param(params, 6, kNotify, "nbits");
            m.ntime = hex32_param(params, 7, kNotify, "ntime");
            const json& clean = param_at(params, 8, kNotify, "clean_jobs");
            if (!clean.is_boolean()) throw CodecError("mining.notify: param 'clean_jobs' must be a boolean");
            m.clean_jobs = clean.get<bool>();
            m.extras = collect_extras(obj);
            return m;
        }
        if (method == kSubmit) {
            Submit m;
            m.id = require_id(obj, kSubmit);
            m.username = str_param(params, 0, kSubmit, "username");
            m.job_id = str_param(params, 1, kSubmit, "job_id");
            m.ntime = hex32_param(params, 2, kSubmit, "time");
            m.nonce = hex32_param(params, 3, kSubmit, "nonce");
            std::string en2 = str_param(params, 4, kSubmit, "extranonce2");
            if (!is_hex(en2)) throw CodecError("mining.submit: param 'extranonce2' must be hex");
            m.extranonce2 = from_hex(en2);
            m.extras = collect_extras(obj);
            return m;
        }
        if (method == kEncrypted) {
            MiningEncrypted m;
            try {
                m.ciphertext = crypto::base64_decode(str_param(params, 0, kEncrypted, "ciphertext"));
                m.nonce = crypto::base64_decode(str_param(params, 1, kEncrypted, "nonce"));
            } catch (const std::invalid_argument& e) {
                throw CodecError(std::string("mining.encrypted: ") + e.what());
            }
            m.extras = collect_extras(obj);
            return m;
        }
        return Unknown{std::string(line)};
    }

    if (obj.contains("result")) {
        const json& result = obj["result"];
        if (result.is_array()) {
            if (result.size() < 3) throw CodecError("subscribe result: expected 3 elements");
            SubscribeResult m;
            m.id = require_id(obj, "subscribe result");
            if (result[0].is_array())
                for (const auto& sub : result[0])
                    if (sub.is_array() && sub.size() >= 2)
                        m.subscriptions.emplace_back(sub[0].get<std::string>(), sub[1].get<std::string>());
            if (!result[1].is_string() || !is_hex(result[1].get<std::string>()))
                throw CodecError("subscribe result: field 'extranonce1' must be hex");
            m.extranonce1 = from_hex(result[1].get<std::string>());
            if (!result[2].is_number_unsigned())
                throw CodecError("subscribe result: field 'extranonce2_size' must be a non-negative integer");
            m.extranonce2_size = result[2].get<size_t>();
            m.extras = collect_extras(obj);
            return m;
        }
        StatusResult m;
        m.id = require_id(obj, "status result");
        m.accepted = result.is_boolean() && result.get<bool>();
        if (obj.contains("error") && obj["error"].is_array() && obj["error"].size() >= 2)
            m.error = {obj["error"][0].get<int>(), obj["error"][1].get<std::string>()};
        m.extras = collect_extras(obj);
        return m;
    }

    return Unknown{std::string(line)};
}

namespace {
struct Classifier {
    Direction operator()(const Subscribe&) const { return Direction::miner_to_pool; }
    Direction operator()(const SubscribeResult&) const { return Direction::pool_to_miner; }
    Direction operator()(const Authorize&) const { return Direction::miner_to_pool; }
    Direction operator()(const SetDifficulty&) const { return Direction::pool_to_miner; }
    Direction operator()(const Notify&) const { return Direction::pool_to_miner; }
    Direction operator()(const Submit&) const { return Direction::miner_to_pool; }
    Direction operator()(const StatusResult&) const { return Direction::pool_to_miner; }
    Direction operator()(const MiningEncrypted& m) const {
        return m.from_miner ? Direction::miner_to_pool : Direction::pool_to_miner;
    }
    Direction operator()(const Unknown&) const { return Direction::miner_to_pool; }
};

struct MethodName {
    std::string_view operator()(const Subscribe&) const { return kSubscribe; }
    std::string_view operator()(const SubscribeResult&) const { return "result.subscribe"; }
    std::string_view operator()(const Authorize&) const { return kAuthorize; }
    std::string_view operator()(const SetDifficulty&) const { return kSetDifficulty; }
    std::string_view operator()(const Notify&) const { return kNotify; }
    std::string_view operator()(const Submit&) const { return kSubmit; }
    std::string_view operator()(const StatusResult&) const { return "result.status"; }
    std::string_view operator()(const MiningEncrypted&) const { return kEncrypted; }
    std::string_view operator()(const Unknown&) const { return "unknown"; }
};
}  // namespace

Direction classify_direction(const StratumMessage& m) { return std::visit(Classifier{}, m); }

std::string_view method_name(const StratumMessage& m) { return std::visit(MethodName{}, m); }

}  // namespace stratlab::stratum
