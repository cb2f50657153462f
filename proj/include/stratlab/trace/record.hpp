#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stratlab/bytes.hpp"
#include "stratlab/netsim/clock.hpp"

namespace stratlab::trace {

namespace flag {
inline constexpr uint8_t SYN = 0x01;
inline constexpr uint8_t ACK = 0x02;
inline constexpr uint8_t PSH = 0x04;
inline constexpr uint8_t FIN = 0x08;
inline constexpr uint8_t RST = 0x10;
}  // namespace flag

std::string flags_to_string(uint8_t flags);
uint8_t flags_from_string(std::string_view s);

/// One captured wire event. The metadata-only view drops the payload and
/// keeps everything else.
struct PacketRecord {
    netsim::SimTime timestamp = 0;
    std::string src_ip;
    uint16_t src_port = 0;
    std::string dst_ip;
    uint16_t dst_port = 0;
    uint8_t flags = 0;
    uint32_t payload_len = 0;
    std::optional<Bytes> payload;

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

class CaptureSink {
public:
    virtual ~CaptureSink() = default;
    virtual void on_record(const PacketRecord& r) = 0;
};

class VectorSink : public CaptureSink {
public:
    void on_record(const PacketRecord& r) override { records.push_back(r); }
    std::vector<PacketRecord> records;
};

}  // namespace stratlab::trace
