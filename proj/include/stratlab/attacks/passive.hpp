#pragma once

#include <string>
#include <vector>

#include "stratlab/trace/stratum_view.hpp"

namespace stratlab::attacks {

/// One constant-difficulty stretch between difficulty notifications.
struct EpochDetail {
    double difficulty = 0;
    long accepted = 0;
    double duration_s = 0;
    double mean_share_time_s = 0;  // duration / accepted
};

struct PayoutPrediction {
    double inferred_hashrate_hs = 0;
    double predicted_daily_payout_btc = 0;
    bool low_confidence = false;
    std::vector<EpochDetail> epochs;
};

struct StratapOptions {
    double fallback_min_difficulty = 1024;  // used when no difficulty message is visible
    double btc_per_ths_day = puzzle::kDefaultBtcPerThsDay;
};

/// Full-payload payout inference for one miner's traffic: difficulty epochs
/// from set_difficulty messages, accepted counts from submit/result
/// matching, Eq.-4 hashrate per epoch, duration-weighted average.
PayoutPrediction stratap_infer(const std::vector<trace::PacketRecord>& records,
                               const std::string& pool_ip, uint16_t pool_port,
                               const StratapOptions& opts = {});

struct IspLogOptions {
    /// Miner→pool PSH packets assumed to be subscription traffic, skipped
    /// before counting shares.
    int skip_packets = 2;
    int packet_count = 50;
    /// Sampling stops this long after the handshake, mirroring the pool's
    /// inference timeout so slow miners don't leak post-window packets in.
    double window_cap_s = 288.0;
    double assumed_min_difficulty = 1024;
    double btc_per_ths_day = puzzle::kDefaultBtcPerThsDay;
};

/// Metadata-only payout inference: mean inter-packet time of the first
/// packets after each handshake at the known minimum difficulty, averaged
/// across the sessions in the trace.
PayoutPrediction isplog_infer(const trace::MetadataTrace& metadata, const std::string& pool_ip,
                              uint16_t pool_port, const IspLogOptions& opts = {});

struct ErrorReport {
    double mse = 0;
    double mpe_percent = 0;  // positive when predictions run low, negative when high
};

/// MSE = (1/n)Σ(P̄ᵢ−Pᵢ)², MPE = (100/n)Σ(Pᵢ−P̄ᵢ)/Pᵢ.
ErrorReport error_report(const std::vector<double>& predicted, const std::vector<double>& actual);

}  // namespace stratlab::attacks
