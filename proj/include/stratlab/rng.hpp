#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace stratlab {

// Every random stream in a run is derived from the scenario seed plus a
// stream name, so adding a miner never perturbs the others' draws.
uint64_t derive_seed(uint64_t run_seed, std::string_view stream_name);

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}
    Rng(uint64_t run_seed, std::string_view stream_name) : gen_(derive_seed(run_seed, stream_name)) {}

    uint64_t next_u64() { return gen_(); }
    uint32_t next_u32() { return static_cast<uint32_t>(gen_()); }

    /// Uniform in [0,1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Inverse-CDF exponential draw; avoids the unspecified state advance of
    /// std::exponential_distribution so traces stay seed-reproducible.
    double next_exponential(double mean) {
        double u;
        do {
            u = next_unit();
        } while (u <= 0.0);
        return -mean * std::log(u);
    }

    uint64_t next_below(uint64_t bound) {  // bound > 0
        return gen_() % bound;
    }

    void fill(uint8_t* out, size_t n) {
        size_t i = 0;
        while (i < n) {
            uint64_t v = gen_();
            for (int b = 0; b < 8 && i < n; ++b, ++i) out[i] = static_cast<uint8_t>(v >> (8 * b));
        }
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace stratlab
