#pragma once

#include <utility>
#include <vector>

namespace stratlab::miner {

/// AntMiner-S7-style chip clock → device hashrate curve, piecewise linear
/// through the 13 calibration points between 100 and 700 MHz.
double frequency_to_hashrate(double mhz);

const std::vector<std::pair<double, double>>& frequency_table();  // (MHz, H/s)

}  // namespace stratlab::miner
