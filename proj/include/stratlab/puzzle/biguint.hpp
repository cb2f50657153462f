#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "stratlab/bytes.hpp"

namespace stratlab::puzzle {

/// Fixed-width unsigned integer over 32-bit limbs, least significant limb
/// first. Width 256 carries targets; width 512 carries the intermediate
/// products of the difficulty algebra.
template <unsigned Bits>
class BigUint {
    static_assert(Bits % 32 == 0);

public:
    static constexpr unsigned kLimbs = Bits / 32;

    constexpr BigUint() : limbs_{} {}
    constexpr explicit BigUint(uint64_t v) : limbs_{} {
        limbs_[0] = static_cast<uint32_t>(v);
        if constexpr (kLimbs > 1) limbs_[1] = static_cast<uint32_t>(v >> 32);
        else if (v >> 32) throw std::overflow_error("value too wide");
    }

    static constexpr BigUint zero() { return BigUint(); }
    static constexpr BigUint one() { return BigUint(uint64_t{1}); }

    static BigUint max_value() {
        BigUint r;
        r.limbs_.fill(0xffffffffu);
        return r;
    }

    /// 2^exp − 1; exp ≤ Bits.
    static BigUint ones(unsigned exp) {
        if (exp > Bits) throw std::overflow_error("width exceeded");
        BigUint r;
        for (unsigned i = 0; i < exp / 32; ++i) r.limbs_[i] = 0xffffffffu;
        if (exp % 32) r.limbs_[exp / 32] = (uint32_t(1) << (exp % 32)) - 1;
        return r;
    }

    static BigUint pow2(unsigned exp) {
        if (exp >= Bits) throw std::overflow_error("width exceeded");
        BigUint r;
        r.limbs_[exp / 32] = uint32_t(1) << (exp % 32);
        return r;
    }

    bool is_zero() const {
        return std::all_of(limbs_.begin(), limbs_.end(), [](uint32_t l) { return l == 0; });
    }

    unsigned bit_length() const {
        for (int i = kLimbs - 1; i >= 0; --i)
            if (limbs_[i]) return 32 * i + (32 - std::countl_zero(limbs_[i]));
        return 0;
    }

    bool bit(unsigned i) const { return (limbs_[i / 32] >> (i % 32)) & 1; }

    friend std::strong_ordering operator<=>(const BigUint& a, const BigUint& b) {
        for (int i = kLimbs - 1; i >= 0; --i)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
        return std::strong_ordering::equal;
    }
    friend bool operator==(const BigUint&, const BigUint&) = default;

    BigUint& operator+=(const BigUint& o) {
        uint64_t carry = 0;
        for (unsigned i = 0; i < kLimbs; ++i) {
            uint64_t s = uint64_t(limbs_[i]) + o.limbs_[i] + carry;
            limbs_[i] = static_cast<uint32_t>(s);
            carry = s >> 32;
        }
        if (carry) throw std::overflow_error("add overflow");
        return *this;
    }

    BigUint& operator-=(const BigUint& o) {
        int64_t borrow = 0;
        for (unsigned i = 0; i < kLimbs; ++i) {
            int64_t d = int64_t(limbs_[i]) - o.limbs_[i] - borrow;
            borrow = d < 0 ? 1 : 0;
            limbs_[i] = static_cast<uint32_t>(d);
        }
        if (borrow) throw std::underflow_error("subtract underflow");
        return *this;
    }

    friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }
    friend BigUint operator-(BigUint a, const BigUint& b) { return a -= b; }

    BigUint& operator<<=(unsigned n) {
        if (n >= Bits) {
            if (!is_zero() && bit_length() + n > Bits) throw std::overflow_error("shift overflow");
            limbs_.fill(0);
            return *this;
        }
        if (!is_zero() && bit_length() + n > Bits) throw std::overflow_error("shift overflow");
        unsigned limb_shift = n / 32, bit_shift = n % 32;
        for (int i = kLimbs - 1; i >= 0; --i) {
            uint32_t v = 0;
            int src = i - int(limb_shift);
            if (src >= 0) {
                v = limbs_[src] << bit_shift;
                if (bit_shift && src > 0) v |= limbs_[src - 1] >> (32 - bit_shift);
            }
            limbs_[i] = v;
        }
        return *this;
    }

    BigUint& operator>>=(unsigned n) {
        if (n >= Bits) {
            limbs_.fill(0);
            return *this;
        }
        unsigned limb_shift = n / 32, bit_shift = n % 32;
        for (unsigned i = 0; i < kLimbs; ++i) {
            uint32_t v = 0;
            unsigned src = i + limb_shift;
            if (src < kLimbs) {
                v = limbs_[src] >> bit_shift;
                if (bit_shift && src + 1 < kLimbs) v |= limbs_[src + 1] << (32 - bit_shift);
            }
            limbs_[i] = v;
        }
        return *this;
    }

    friend BigUint operator<<(BigUint a, unsigned n) { return a <<= n; }
    friend BigUint operator>>(BigUint a, unsigned n) { return a >>= n; }

    /// Full-width product.
    template <unsigned OtherBits>
    BigUint<Bits + OtherBits> mul_wide(const BigUint<OtherBits>& o) const {
        BigUint<Bits + OtherBits> r;
        for (unsigned i = 0; i < kLimbs; ++i) {
            if (limbs_[i] == 0) continue;
            uint64_t carry = 0;
            for (unsigned j = 0; j < BigUint<OtherBits>::kLimbs; ++j) {
                uint64_t cur = uint64_t(r.limb(i + j)) + uint64_t(limbs_[i]) * o.limb(j) + carry;
                r.set_limb(i + j, static_cast<uint32_t>(cur));
                carry = cur >> 32;
            }
            unsigned k = i + BigUint<OtherBits>::kLimbs;
            while (carry) {
                uint64_t cur = uint64_t(r.limb(k)) + carry;
                r.set_limb(k, static_cast<uint32_t>(cur));
                carry = cur >> 32;
                ++k;
            }
        }
        return r;
    }

    struct DivResult {
        BigUint quotient;
        BigUint remainder;
    };

    /// Schoolbook binary long division.
    DivResult divmod(const BigUint& divisor) const {
        if (divisor.is_zero()) throw std::domain_error("division by zero");
        DivResult r;
        unsigned n = bit_length();
        if (n == 0) return r;
        unsigned d = divisor.bit_length();
        if (n < d) {
            r.remainder = *this;
            return r;
        }
        for (int i = int(n) - 1; i >= 0; --i) {
            r.remainder.shift_left_one_unchecked();
            if (bit(unsigned(i))) r.remainder.limbs_[0] |= 1;
            if (r.remainder >= divisor) {
                r.remainder -= divisor;
                r.quotient.limbs_[unsigned(i) / 32] |= uint32_t(1) << (unsigned(i) % 32);
            }
        }
        return r;
    }

    friend BigUint operator/(const BigUint& a, const BigUint& b) { return a.divmod(b).quotient; }
    friend BigUint operator%(const BigUint& a, const BigUint& b) { return a.divmod(b).remainder; }

    uint64_t to_u64() const {
        for (unsigned i = 2; i < kLimbs; ++i)
            if (limbs_[i]) throw std::overflow_error("does not fit u64");
        return uint64_t(limbs_[0]) | (kLimbs > 1 ? uint64_t(limbs_[1]) << 32 : 0);
    }

    double to_double() const {
        double r = 0;
        for (int i = kLimbs - 1; i >= 0; --i) r = r * 4294967296.0 + limbs_[i];
        return r;
    }

    template <unsigned NarrowBits>
    BigUint<NarrowBits> truncate() const {
        static_assert(NarrowBits <= Bits);
        if (bit_length() > NarrowBits) throw std::overflow_error("truncation loses bits");
        BigUint<NarrowBits> r;
        for (unsigned i = 0; i < BigUint<NarrowBits>::kLimbs; ++i) r.set_limb(i, limbs_[i]);
        return r;
    }

    template <unsigned WideBits>
    BigUint<WideBits> widen() const {
        static_assert(WideBits >= Bits);
        BigUint<WideBits> r;
        for (unsigned i = 0; i < kLimbs; ++i) r.set_limb(i, limbs_[i]);
        return r;
    }

    static BigUint from_le_bytes(ByteSpan bytes) {
        if (bytes.size() != Bits / 8) throw std::invalid_argument("wrong byte count");
        BigUint r;
        for (unsigned i = 0; i < Bits / 8; ++i)
            r.limbs_[i / 4] |= uint32_t(bytes[i]) << (8 * (i % 4));
        return r;
    }

    Bytes to_le_bytes() const {
        Bytes out(Bits / 8);
        for (unsigned i = 0; i < Bits / 8; ++i)
            out[i] = static_cast<uint8_t>(limbs_[i / 4] >> (8 * (i % 4)));
        return out;
    }

    /// Big-endian, fixed-width, lowercase.
    std::string to_hex() const {
        Bytes le = to_le_bytes();
        Bytes be(le.rbegin(), le.rend());
        return stratlab::to_hex(be);
    }

    static BigUint from_hex(std::string_view hex) {
        Bytes be = stratlab::from_hex(hex);
        if (be.size() > Bits / 8) throw std::overflow_error("hex too wide");
        Bytes le(be.rbegin(), be.rend());
        le.resize(Bits / 8, 0);
        return from_le_bytes(le);
    }

    uint32_t limb(unsigned i) const { return i < kLimbs ? limbs_[i] : 0; }
    void set_limb(unsigned i, uint32_t v) {
        if (i < kLimbs) limbs_[i] = v;
        else if (v) throw std::overflow_error("limb out of range");
    }

private:
    void shift_left_one_unchecked() {
        for (int i = kLimbs - 1; i > 0; --i)
            limbs_[i] = (limbs_[i] << 1) | (limbs_[i - 1] >> 31);
        limbs_[0] <<= 1;
    }

    std::array<uint32_t, kLimbs> limbs_;
};

using U256 = BigUint<256>;
using U512 = BigUint<512>;

}  // namespace stratlab::puzzle
