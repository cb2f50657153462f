#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stratlab {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);  // accepts upper and lower case
bool is_hex(std::string_view s);

// Fixed-width lowercase hex of a 32-bit value, most significant byte first.
std::string hex32(uint32_t v);
uint32_t parse_hex32(std::string_view s);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

void put_u32_le(Bytes& out, uint32_t v);
uint32_t get_u32_le(ByteSpan in, size_t offset);

inline void append(Bytes& out, ByteSpan more) { out.insert(out.end(), more.begin(), more.end()); }

}  // namespace stratlab
