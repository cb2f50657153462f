#include "stratlab/miner/frequency.hpp"

#include "stratlab/errors.hpp"

namespace stratlab::miner {

const std::vector<std::pair<double, double>>& frequency_table() {
    static const std::vector<std::pair<double, double>> table = {
        {100, 672.55e9},  {150, 1010.19e9}, {200, 1347.14e9}, {250, 1687.17e9}, {300, 2023.65e9},
        {350, 2364.61e9}, {400, 2689.34e9}, {450, 3030.01e9}, {500, 3365.38e9}, {550, 3693.90e9},
        {600, 4040.49e9}, {650, 4371.85e9}, {700, 4720.55e9},
    };
    return table;
}

double frequency_to_hashrate(double mhz) {
    const auto& table = frequency_table();
    if (mhz < table.front().first || mhz > table.back().first)
        throw ConfigError("frequency outside the calibrated 100..700 MHz range");
    for (size_t i = 1; i < table.size(); ++i) {
        if (mhz <= table[i].first) {
            auto [f0, h0] = table[i - 1];
            auto [f1, h1] = table[i];
            return h0 + (h1 - h0) * (mhz - f0) / (f1 - f0);
        }
    }
    return table.back().second;
}

}  // namespace stratlab::miner
