#include "stratlab/trace/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "stratlab/errors.hpp"

namespace stratlab::trace {

using nlohmann::json;

std::string flags_to_string(uint8_t flags) {
    std::string s;
    if (flags & flag::SYN) s += 'S';
    if (flags & flag::ACK) s += 'A';
    if (flags & flag::PSH) s += 'P';
    if (flags & flag::FIN) s += 'F';
    if (flags & flag::RST) s += 'R';
    return s;
}

uint8_t flags_from_string(std::string_view s) {
    uint8_t f = 0;
    for (char c : s) {
        switch (c) {
            case 'S': f |= flag::SYN; break;
            case 'A': f |= flag::ACK; break;
            case 'P': f |= flag::PSH; break;
            case 'F': f |= flag::FIN; break;
            case 'R': f |= flag::RST; break;
            default: throw CodecError("unknown TCP flag letter");
        }
    }
    return f;
}

namespace {
std::string format_ts(netsim::SimTime t) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%" PRId64 ".%06" PRId64, t / netsim::kMicrosPerSecond,
                  t % netsim::kMicrosPerSecond);
    return buf;
}

netsim::SimTime parse_ts(const std::string& s) {
    size_t dot = s.find('.');
    int64_t secs = std::stoll(s.substr(0, dot));
    int64_t micros = 0;
    if (dot != std::string::npos) {
        std::string frac = s.substr(dot + 1);
        frac.resize(6, '0');
        micros = std::stoll(frac);
    }
    return secs * netsim::kMicrosPerSecond + micros;
}
}  // namespace

std::string record_to_json_line(const PacketRecord& r) {
    json obj{{"ts", format_ts(r.timestamp)},
             {"src_ip", r.src_ip},
             {"src_port", r.src_port},
             {"dst_ip", r.dst_ip},
             {"dst_port", r.dst_port},
             {"flags", flags_to_string(r.flags)},
             {"len", r.payload_len}};
    if (r.payload) obj["payload"] = to_hex(*r.payload);
    return obj.dump();
}

PacketRecord record_from_json_line(std::string_view line, size_t line_number) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw CodecError("trace line " + std::to_string(line_number) + ": " + e.what());
    }
    try {
        PacketRecord r;
        r.timestamp = parse_ts(obj.at("ts").get<std::string>());
        r.src_ip = obj.at("src_ip").get<std::string>();
        r.src_port = obj.at("src_port").get<uint16_t>();
        r.dst_ip = obj.at("dst_ip").get<std::string>();
        r.dst_port = obj.at("dst_port").get<uint16_t>();
        r.flags = flags_from_string(obj.at("flags").get<std::string>());
        r.payload_len = obj.at("len").get<uint32_t>();
        if (obj.contains("payload")) r.payload = from_hex(obj["payload"].get<std::string>());
        return r;
    } catch (const json::exception& e) {
        throw CodecError("trace line " + std::to_string(line_number) + ": " + e.what());
    }
}

void write_trace(std::ostream& out, const std::vector<PacketRecord>& records) {
    for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

void write_trace(const std::string& path, const std::vector<PacketRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open trace file for writing: " + path);
    write_trace(out, records);
}

std::vector<PacketRecord> read_trace(std::istream& in) {
    std::vector<PacketRecord> records;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        records.push_back(record_from_json_line(line, line_number));
    }
    return records;
}

std::vector<PacketRecord> read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    return read_trace(in);
}

FileTraceSink::FileTraceSink(const std::string& path) : out_(path) {
    if (!out_) throw ConfigError("cannot open trace file for writing: " + path);
}

void FileTraceSink::on_record(const PacketRecord& r) { out_ << record_to_json_line(r) << '\n'; }

void FileTraceSink::flush() { out_.flush(); }

std::vector<PacketRecord> redact_to_metadata(std::vector<PacketRecord> records) {
    for (auto& r : records) r.payload.reset();
    return records;
}

std::vector<std::vector<PacketRecord>> slice_trace(const std::vector<PacketRecord>& records,
                                                   netsim::SimTime window) {
    if (window <= 0) throw DomainError("slice window must be positive");
    std::vector<std::vector<PacketRecord>> out;
    for (const auto& r : records) {
        auto idx = size_t(r.timestamp / window);
        if (out.size() <= idx) out.resize(idx + 1);
        out[idx].push_back(r);
    }
    return out;
}

std::vector<SessionStart> detect_sessions(const std::vector<PacketRecord>& records,
                                          const std::string& server_ip, uint16_t server_port) {
    // Keyed by client endpoint; 0 → SYN seen, 1 → SYN+ACK seen.
    std::map<std::pair<std::string, uint16_t>, int> progress;
    std::vector<SessionStart> sessions;
    for (const auto& r : records) {
        bool to_server = r.dst_ip == server_ip && r.dst_port == server_port;
        bool from_server = r.src_ip == server_ip && r.src_port == server_port;
        if ((r.flags & flag::SYN) && !(r.flags & flag::ACK) && to_server) {
            progress[{r.src_ip, r.src_port}] = 1;
        } else if ((r.flags & flag::SYN) && (r.flags & flag::ACK) && from_server) {
            auto it = progress.find({r.dst_ip, r.dst_port});
            if (it != progress.end() && it->second == 1) it->second = 2;
        } else if ((r.flags & flag::ACK) && !(r.flags & flag::SYN) && to_server) {
            auto it = progress.find({r.src_ip, r.src_port});
            if (it != progress.end() && it->second == 2) {
                sessions.push_back(
                    {r.timestamp, FourTuple{r.src_ip, r.src_port, r.dst_ip, r.dst_port}});
                progress.erase(it);
            }
        }
    }
    return sessions;
}

// ------------------------------------------------------------------ sidecar

void write_sidecar(const std::string& path, const Sidecar& sc) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open sidecar file for writing: " + path);
    out << json{{"type", "run"},
                {"seed", sc.run.seed},
                {"duration_s", sc.run.duration_s},
                {"bedrock", sc.run.bedrock},
                {"pool_ip", sc.run.pool_ip},
                {"pool_port", sc.run.pool_port}}
               .dump()
        << '\n';
    for (const auto& m : sc.miners)
        out << json{{"type", "miner"},
                    {"username", m.username},
                    {"ip", m.ip},
                    {"hashrate_hs", m.hashrate_hs},
                    {"frequency_mhz", m.frequency_mhz}}
                   .dump()
            << '\n';
    for (const auto& p : sc.payouts)
        out << json{{"type", "payout"},
                    {"username", p.username},
                    {"btc", p.btc},
                    {"period_start_s", p.period_start_s},
                    {"period_end_s", p.period_end_s}}
                   .dump()
            << '\n';
    for (const auto& d : sc.difficulty_changes)
        out << json{{"type", "difficulty"},
                    {"username", d.username},
                    {"time_s", d.time_s},
                    {"difficulty", d.difficulty}}
                   .dump()
            << '\n';
    for (const auto& b : sc.bedrock_events)
        out << json{{"type", "bedrock_event"},
                    {"kind", b.kind},
                    {"username", b.username},
                    {"time_s", b.time_s}}
                   .dump()
            << '\n';
}

Sidecar read_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sidecar file: " + path);
    Sidecar sc;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw CodecError("sidecar line " + std::to_string(line_number) + ": " + e.what());
        }
        std::string type = obj.value("type", "");
        if (type == "run") {
            sc.run.seed = obj.value("seed", uint64_t{0});
            sc.run.duration_s = obj.value("duration_s", 0.0);
            sc.run.bedrock = obj.value("bedrock", false);
            sc.run.pool_ip = obj.value("pool_ip", "");
            sc.run.pool_port = obj.value("pool_port", uint16_t{0});
        } else if (type == "miner") {
            sc.miners.push_back({obj.value("username", ""), obj.value("ip", ""),
                                 obj.value("hashrate_hs", 0.0), obj.value("frequency_mhz", 0.0)});
        } else if (type == "payout") {
            sc.payouts.push_back({obj.value("username", ""), obj.value("btc", 0.0),
                                  obj.value("period_start_s", 0.0), obj.value("period_end_s", 0.0)});
        } else if (type == "difficulty") {
            sc.difficulty_changes.push_back(
                {obj.value("username", ""), obj.value("time_s", 0.0), obj.value("difficulty", 0.0)});
        } else if (type == "bedrock_event") {
            sc.bedrock_events.push_back(
                {obj.value("kind", ""), obj.value("username", ""), obj.value("time_s", 0.0)});
        }
    }
    return sc;
}

}  // namespace stratlab::trace
