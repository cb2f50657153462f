#pragma once

#include "stratlab/puzzle/difficulty.hpp"

namespace stratlab::pool {

struct PoolPolicy {
    puzzle::Difficulty min_difficulty = puzzle::Difficulty::from_integer(1024);

    // Initial hashrate inference: hold the minimum difficulty until this
    // many accepted shares or until the timeout, whichever first.
    int inference_share_quota = 50;
    double inference_timeout_s = 288.0;

    // Regulated submission band. The difficulty chooser and vardiff both
    // steer the expected rate into this interval.
    double rate_min_per_min = 1.0;
    double rate_max_per_min = 4.0;
    double vardiff_window_s = 600.0;

    double pps_rate_btc_per_ths_day = puzzle::kDefaultBtcPerThsDay;
    double payout_period_s = 86400.0;

    /// Constant extranonce1 (0x30 0x30) instead of per-connection random.
    bool fidelity_extranonce1 = true;

    double job_interval_s = 30.0;
    double tip_mean_s = 600.0;  // Poisson new-tip events; 0 disables

    /// Fraction of otherwise-valid submissions that silently get no status
    /// result (and no credit).
    double ignore_fraction = 0.0;

    /// Real-hash scenarios verify every submitted solution; timing-model
    /// fleets submit placeholder solutions the pool accepts by policy.
    bool verify_shares = false;

    /// Block ("mined") threshold; defines the jobs' nbits field.
    puzzle::Difficulty block_difficulty = puzzle::Difficulty::from_double(2.58522748405e11);

    bool bedrock = false;
    double hashrate_report_timeout_s = 10.0;

    /// Overhead baseline: wrap every post-authorization message on both
    /// directions in mining.encrypted.
    bool all_encrypt = false;
};

/// Power-of-two difficulty that keeps a vardiff window's share count inside
/// the policy band with the least Poisson escape probability. Clamped to
/// the policy minimum.
puzzle::Difficulty choose_difficulty(double hashrate_hs, const PoolPolicy& policy);

/// P(count outside [lo, hi]) for a Poisson window with the given mean.
double poisson_out_of_band(double mean, int lo_count, int hi_count);

}  // namespace stratlab::pool
