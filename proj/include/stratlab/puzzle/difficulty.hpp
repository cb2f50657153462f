#pragma once

#include <cstdint>
#include <string>

#include "stratlab/puzzle/biguint.hpp"

namespace stratlab::puzzle {

/// 256-bit share/block threshold. A hash wins when, read as a little-endian
/// integer, it is strictly below the target.
struct Target {
    U256 value;

    friend auto operator<=>(const Target&, const Target&) = default;
};

/// difficulty-1 reference target: 2^224 − 1.
Target target_one();

/// Exact positive rational. Pool-facing difficulties are integers or powers
/// of two, but the algebra must round-trip exactly, so no floating point.
class Difficulty {
public:
    Difficulty() : num_(U256::one()), den_(U256::one()) {}
    Difficulty(U256 numerator, U256 denominator);
    static Difficulty from_integer(uint64_t d);

    /// Exact conversion: every finite positive double is a dyadic rational.
    static Difficulty from_double(double d);

    const U256& numerator() const { return num_; }
    const U256& denominator() const { return den_; }

    bool is_integer() const;
    U256 integer_part() const;
    double to_double() const;
    std::string to_string() const;

    friend bool operator==(const Difficulty& a, const Difficulty& b);
    friend std::strong_ordering operator<=>(const Difficulty& a, const Difficulty& b);

private:
    U256 num_, den_;  // common powers of two stripped; not otherwise reduced
};

/// floor(target_1 / d). Accepts any positive d whose target fits 256 bits;
/// sub-1 difficulties give targets above target_1 (easy desk-scale shares).
Target difficulty_to_target(const Difficulty& d);

/// Exact rational target_1 / t.
Difficulty target_to_difficulty(const Target& t);

/// Expected hash evaluations per share: d × 2^32.
double expected_hashes(const Difficulty& d);

/// Eq.-of-motion of every inference in this project: h = d × 2^32 / t̄.
double hashrate_from_time(const Difficulty& d, double mean_share_time_s);

inline constexpr double kDefaultBtcPerThsDay = 0.00246248;

double payout_from_hashrate(double hashes_per_s, double btc_per_ths_day = kDefaultBtcPerThsDay);

// Compact "nbits" target encoding (exponent byte + 3 mantissa bytes).
Target nbits_to_target(uint32_t nbits);
uint32_t target_to_nbits(const Target& t);

}  // namespace stratlab::puzzle
