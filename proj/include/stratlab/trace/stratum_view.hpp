#pragma once

#include <string>
#include <vector>

#include "stratlab/stratum/codec.hpp"
#include "stratlab/trace/trace_io.hpp"

namespace stratlab::trace {

/// A full-payload trace regrouped into per-connection Stratum message
/// streams: byte streams reassembled per direction, then split into lines
/// and decoded. Robust to arbitrary segmentation.
struct SessionMessages {
    FourTuple tuple;  // client → server orientation
    netsim::SimTime start = 0;
    netsim::SimTime end = 0;

    struct Entry {
        netsim::SimTime ts = 0;  // timestamp of the record completing the line
        bool to_server = false;
        stratum::StratumMessage msg;
    };
    std::vector<Entry> entries;
};

std::vector<SessionMessages> extract_sessions(const std::vector<PacketRecord>& records,
                                              const std::string& server_ip, uint16_t server_port);

/// Client IPs with at least one session toward the server, in first-seen
/// order; the per-miner grouping key for fleet analyses.
std::vector<std::string> client_ips(const std::vector<PacketRecord>& records,
                                    const std::string& server_ip, uint16_t server_port);

std::vector<PacketRecord> filter_client_ip(const std::vector<PacketRecord>& records,
                                           const std::string& client_ip);

}  // namespace stratlab::trace
