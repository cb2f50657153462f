#include "stratlab/bytes.hpp"

#include <stdexcept>

namespace stratlab {

namespace {
constexpr char kDigits[] = "0123456789abcdef";

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string to_hex(ByteSpan data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

bool is_hex(std::string_view s) {
    if (s.size() % 2 != 0) return false;
    for (char c : s)
        if (nibble(c) < 0) return false;
    return true;
}

std::string hex32(uint32_t v) {
    std::string out(8, '0');
    for (int i = 7; i >= 0; --i) {
        out[i] = kDigits[v & 0x0f];
        v >>= 4;
    }
    return out;
}

uint32_t parse_hex32(std::string_view s) {
    if (s.size() != 8) throw std::invalid_argument("expected 8 hex chars");
    uint32_t v = 0;
    for (char c : s) {
        int n = nibble(c);
        if (n < 0) throw std::invalid_argument("invalid hex digit");
        v = (v << 4) | static_cast<uint32_t>(n);
    }
    return v;
}

void put_u32_le(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

uint32_t get_u32_le(ByteSpan in, size_t offset) {
    if (offset + 4 > in.size()) throw std::out_of_range("get_u32_le past end");
    return static_cast<uint32_t>(in[offset]) | static_cast<uint32_t>(in[offset + 1]) << 8 |
           static_cast<uint32_t>(in[offset + 2]) << 16 | static_cast<uint32_t>(in[offset + 3]) << 24;
}

}  // namespace stratlab
