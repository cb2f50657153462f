#include "stratlab/trace/stratum_view.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stratlab/errors.hpp"

namespace stratlab::trace {

std::vector<SessionMessages> extract_sessions(const std::vector<PacketRecord>& records,
                                              const std::string& server_ip, uint16_t server_port) {
    struct Builder {
        SessionMessages session;
        std::string buf_to_server, buf_to_client;
    };
    std::map<std::pair<std::string, uint16_t>, Builder> builders;  // client endpoint → session
    std::vector<SessionMessages> done;

    auto flush = [&](Builder& b) { done.push_back(std::move(b.session)); };

    for (const auto& r : records) {
        bool to_server = r.dst_ip == server_ip && r.dst_port == server_port;
        bool from_server = r.src_ip == server_ip && r.src_port == server_port;
        if (!to_server && !from_server) continue;
        auto client = to_server ? std::make_pair(r.src_ip, r.src_port)
                                : std::make_pair(r.dst_ip, r.dst_port);

        if ((r.flags & flag::SYN) && to_server) {
            // A fresh SYN from a reused endpoint starts a new session.
            if (auto it = builders.find(client); it != builders.end()) {
                flush(it->second);
                builders.erase(it);
            }
            Builder b;
            b.session.tuple = {r.src_ip, r.src_port, r.dst_ip, r.dst_port};
            b.session.start = r.timestamp;
            b.session.end = r.timestamp;
            builders.emplace(client, std::move(b));
            continue;
        }
        auto it = builders.find(client);
        if (it == builders.end()) continue;
        Builder& b = it->second;
        b.session.end = std::max(b.session.end, r.timestamp);
        if (!r.payload || r.payload->empty()) continue;

        std::string& buf = to_server ? b.buf_to_server : b.buf_to_client;
        buf.append(reinterpret_cast<const char*>(r.payload->data()), r.payload->size());
        size_t pos;
        while ((pos = buf.find('\n')) != std::string::npos) {
            std::string line = buf.substr(0, pos + 1);
            buf.erase(0, pos + 1);
            SessionMessages::Entry e;
            e.ts = r.timestamp;
            e.to_server = to_server;
            try {
                e.msg = stratum::decode(line);
            } catch (const CodecError&) {
                continue;  // unparseable bytes are not this analysis's problem
            }
            b.session.entries.push_back(std::move(e));
        }
    }
    for (auto& [client, b] : builders) flush(b);
    std::sort(done.begin(), done.end(),
              [](const SessionMessages& a, const SessionMessages& b) { return a.start < b.start; });
    return done;
}

std::vector<std::string> client_ips(const std::vector<PacketRecord>& records,
                                    const std::string& server_ip, uint16_t server_port) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& r : records) {
        if ((r.flags & flag::SYN) && r.dst_ip == server_ip && r.dst_port == server_port &&
            seen.insert(r.src_ip).second)
            out.push_back(r.src_ip);
    }
    return out;
}

std::vector<PacketRecord> filter_client_ip(const std::vector<PacketRecord>& records,
                                           const std::string& client_ip) {
    std::vector<PacketRecord> out;
    for (const auto& r : records)
        if (r.src_ip == client_ip || r.dst_ip == client_ip) out.push_back(r);
    return out;
}

}  // namespace stratlab::trace
