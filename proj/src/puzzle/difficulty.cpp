#include "stratlab/puzzle/difficulty.hpp"

#include <cmath>

#include "stratlab/errors.hpp"

namespace stratlab::puzzle {

Target target_one() { return Target{U256::ones(224)}; }

Difficulty::Difficulty(U256 numerator, U256 denominator) : num_(numerator), den_(denominator) {
    if (num_.is_zero()) throw DomainError("difficulty must be positive");
    if (den_.is_zero()) throw DomainError("difficulty denominator must be positive");
    // Keep the representation canonical: strip common powers of two.
    while ((num_.limb(0) & 1) == 0 && (den_.limb(0) & 1) == 0 && !num_.is_zero()) {
        num_ >>= 1;
        den_ >>= 1;
    }
}

Difficulty Difficulty::from_integer(uint64_t d) {
    if (d == 0) throw DomainError("difficulty must be positive");
    return Difficulty(U256(d), U256::one());
}

Difficulty Difficulty::from_double(double d) {
    if (!(d > 0) || !std::isfinite(d)) throw DomainError("difficulty must be a positive finite number");
    int exp = 0;
    double frac = std::frexp(d, &exp);                  // d = frac × 2^exp, frac ∈ [0.5, 1)
    auto mant = static_cast<uint64_t>(std::ldexp(frac, 53));  // exact: 53-bit mantissa
    int shift = exp - 53;
    if (shift >= 0) {
        if (shift > 200) throw DomainError("difficulty too large");
        return Difficulty(U256(mant) << unsigned(shift), U256::one());
    }
    if (shift < -255) throw DomainError("difficulty too small");
    return Difficulty(U256(mant), U256::pow2(unsigned(-shift)));
}

bool Difficulty::is_integer() const { return (num_ % den_).is_zero(); }

U256 Difficulty::integer_part() const { return num_ / den_; }

double Difficulty::to_double() const { return num_.to_double() / den_.to_double(); }

std::string Difficulty::to_string() const {
    if (is_integer() && integer_part().bit_length() <= 64) return std::to_string(integer_part().to_u64());
    return std::to_string(to_double());
}

bool operator==(const Difficulty& a, const Difficulty& b) {
    return a.num_.mul_wide(b.den_) == b.num_.mul_wide(a.den_);
}

std::strong_ordering operator<=>(const Difficulty& a, const Difficulty& b) {
    return a.num_.mul_wide(b.den_) <=> b.num_.mul_wide(a.den_);
}

Target difficulty_to_target(const Difficulty& d) {
    U512 scaled = target_one().value.mul_wide(d.denominator());
    U512 t = scaled / d.numerator().widen<512>();
    if (t.is_zero()) throw DomainError("difficulty exceeds target_1");
    if (t.bit_length() > 256) throw DomainError("difficulty too small: target exceeds 256 bits");
    return Target{t.truncate<256>()};
}

Difficulty target_to_difficulty(const Target& t) {
    if (t.value.is_zero()) throw DomainError("target must be positive");
    return Difficulty(target_one().value, t.value);
}

double expected_hashes(const Difficulty& d) { return d.to_double() * 4294967296.0; }

double hashrate_from_time(const Difficulty& d, double mean_share_time_s) {
    if (!(mean_share_time_s > 0)) throw DomainError("mean share time must be positive");
    return expected_hashes(d) / mean_share_time_s;
}

double payout_from_hashrate(double hashes_per_s, double btc_per_ths_day) {
    if (hashes_per_s < 0) throw DomainError("hashrate must be non-negative");
    return hashes_per_s / 1e12 * btc_per_ths_day;
}

Target nbits_to_target(uint32_t nbits) {
    unsigned exponent = nbits >> 24;
    uint32_t mantissa = nbits & 0x007fffff;
    if (nbits & 0x00800000) throw DomainError("negative compact target");
    U256 v(uint64_t{mantissa});
    if (exponent <= 3) {
        v >>= 8 * (3 - exponent);
    } else {
        if (mantissa != 0 && 8 * (exponent - 3) + v.bit_length() > 256)
            throw DomainError("compact target overflows 256 bits");
        v <<= 8 * (exponent - 3);
    }
    if (v.is_zero()) throw DomainError("zero compact target");
    return Target{v};
}

uint32_t target_to_nbits(const Target& t) {
    if (t.value.is_zero()) throw DomainError("target must be positive");
    unsigned bytes = (t.value.bit_length() + 7) / 8;
    U256 shifted = bytes <= 3 ? t.value << (8 * (3 - bytes)) : t.value >> (8 * (bytes - 3));
    auto mantissa = static_cast<uint32_t>(shifted.to_u64());
    if (mantissa & 0x00800000) {  // avoid the sign bit of the compact form
        mantissa >>= 8;
        ++bytes;
    }
    return (uint32_t(bytes) << 24) | mantissa;
}

}  // namespace stratlab::puzzle
