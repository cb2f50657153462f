#pragma once

#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "stratlab/netsim/network.hpp"
#include "stratlab/trace/record.hpp"

namespace stratlab::trace {

// Trace files are UTF-8 JSON lines, one PacketRecord per line, timestamps as
// decimal seconds with microsecond precision. Payloads are lowercase hex and
// simply absent in metadata-only traces.

void write_trace(std::ostream& out, const std::vector<PacketRecord>& records);
void write_trace(const std::string& path, const std::vector<PacketRecord>& records);

std::vector<PacketRecord> read_trace(std::istream& in);
std::vector<PacketRecord> read_trace(const std::string& path);

std::string record_to_json_line(const PacketRecord& r);
PacketRecord record_from_json_line(std::string_view line, size_t line_number = 0);

/// Streaming capture-to-file sink, so day-long fleet runs never hold the
/// whole trace in memory.
class FileTraceSink : public CaptureSink {
public:
    explicit FileTraceSink(const std::string& path);
    void on_record(const PacketRecord& r) override;
    void flush();

private:
    std::ofstream out_;
};

/// What an ISP log retains: everything but the payload bytes.
std::vector<PacketRecord> redact_to_metadata(std::vector<PacketRecord> records);

/// The metadata-only view the passive ISP-side analyses accept. Constructing
/// one redacts; analyses taking MetadataTrace are payload-blind by type.
class MetadataTrace {
public:
    explicit MetadataTrace(std::vector<PacketRecord> records)
        : records_(redact_to_metadata(std::move(records))) {}
    const std::vector<PacketRecord>& records() const { return records_; }

private:
    std::vector<PacketRecord> records_;
};

/// Cuts a trace into fixed windows (24 simulated hours by default) starting
/// at t = 0. Empty trailing windows are not emitted.
std::vector<std::vector<PacketRecord>> slice_trace(const std::vector<PacketRecord>& records,
                                                   netsim::SimTime window = 86400 * netsim::kMicrosPerSecond);

struct FourTuple {
    std::string src_ip;
    uint16_t src_port = 0;
    std::string dst_ip;
    uint16_t dst_port = 0;
    friend bool operator==(const FourTuple&, const FourTuple&) = default;
};

struct SessionStart {
    netsim::SimTime handshake_time = 0;  // completion of the SYN / SYN+ACK / ACK triple
    FourTuple tuple;                     // client → server orientation
};

/// SYN / SYN+ACK / ACK triples toward the given server endpoint; works on
/// metadata alone.
std::vector<SessionStart> detect_sessions(const std::vector<PacketRecord>& records,
                                          const std::string& server_ip, uint16_t server_port);

// ------------------------------------------------------------------ sidecar

/// Ground truth for a run, written next to the trace and never readable by
/// the attack analyses (they take traces only).
struct Sidecar {
    struct Run {
        uint64_t seed = 0;
        double duration_s = 0;
        bool bedrock = false;
        std::string pool_ip;
        uint16_t pool_port = 0;
    } run;

    struct MinerTruth {
        std::string username;
        std::string ip;
        double hashrate_hs = 0;
        double frequency_mhz = 0;  // 0 when the config gave a raw hashrate
    };
    std::vector<MinerTruth> miners;

    struct Payout {
        std::string username;
        double btc = 0;
        double period_start_s = 0;
        double period_end_s = 0;
    };
    std::vector<Payout> payouts;

    struct DifficultyChange {
        std::string username;
        double time_s = 0;
        double difficulty = 0;
    };
    std::vector<DifficultyChange> difficulty_changes;

    struct BedrockEvent {
        std::string kind;  // "cookie" | "hashrate_report"
        std::string username;
        double time_s = 0;
    };
    std::vector<BedrockEvent> bedrock_events;
};

void write_sidecar(const std::string& path, const Sidecar& sc);
Sidecar read_sidecar(const std::string& path);

}  // namespace stratlab::trace
