#pragma once

#include <optional>
#include <string>

#include "stratlab/bedrock/cookie.hpp"
#include "stratlab/crypto/nonce_scan.hpp"
#include "stratlab/miner/frequency.hpp"
#include "stratlab/miner/nonce_iter.hpp"
#include "stratlab/netsim/network.hpp"
#include "stratlab/pool/pool.hpp"
#include "stratlab/puzzle/puzzle.hpp"
#include "stratlab/rng.hpp"
#include "stratlab/stratum/codec.hpp"

namespace stratlab::miner {

struct MinerConfig {
    std::string username;
    std::string password = "x";

    /// Either a calibrated chip frequency or a direct hashrate.
    double frequency_mhz = 0;
    double hashrate_hs = 0;

    /// timing_model draws share intervals from the memoryless hash process
    /// (placeholder solutions); real_hash actually searches nonces and only
    /// works at desk-scale targets.
    enum class Mode { timing_model, real_hash } mode = Mode::timing_model;

    bool bedrock = false;
    bool all_encrypt = false;
    bool have_key = false;
    crypto::Key key{};

    /// Legacy iteration order: nonce 0,1,2,... and extranonce2 incrementing
    /// on exhaustion, the pattern random iterators exist to remove.
    bool sequential_iteration = false;
    unsigned nonce_space_bits = 32;  // reduced in exhaustion tests

    double connect_time_s = 0;
    double reconnect_every_s = 0;  // 0 = stay connected
    double reconnect_delay_s = 1.0;

    std::string ip = "10.0.1.1";
    uint16_t base_port = 40000;  // next sessions take base_port+1, +2, ...

    uint32_t hash_batch = 2048;  // real-hash scheduling granularity
    int selftest_samples = 200;
    double selftest_duration_s = 2.0;

    double resolved_hashrate() const {
        return frequency_mhz > 0 ? frequency_to_hashrate(frequency_mhz) : hashrate_hs;
    }
};

/// Self-test result: local share sampling at an easy target, damped by the
/// measured subscription round trip.
struct HashrateEstimate {
    double raw_hs = 0;
    double adjusted_hs = 0;
    double rtt_s = 0;
    double selftest_elapsed_s = 0;
};

class Miner {
public:
    Miner(netsim::SimClock& clock, netsim::Network& net, MinerConfig config,
          netsim::EndpointAddr pool_addr, netsim::LatencyModel latency, uint64_t run_seed);

    /// Schedules the first connect at config.connect_time_s.
    void start();

    struct Stats {
        int64_t shares_sent = 0;
        int64_t accepted = 0;
        int64_t rejected = 0;
        int sessions = 0;
        std::optional<HashrateEstimate> last_estimate;
        uint64_t hashes_done = 0;  // real-hash mode
    };
    const Stats& stats() const { return stats_; }
    const MinerConfig& config() const { return config_; }
    netsim::Connection* connection() { return conn_; }

    /// Fires on every (re)connection, before the subscribe goes out: the
    /// interposition point for active attacks.
    std::function<void(netsim::Connection&)> on_connection;

    /// The local sampling procedure behind the secure hashrate report,
    /// exposed for direct testing. Deterministic per miner stream.
    HashrateEstimate estimate_own_hashrate();

private:
    void connect();
    void on_line(std::string_view line);
    void handle(const stratum::StratumMessage& msg);
    void handle_result(const stratum::StatusResult& m);
    void handle_notify(const stratum::Notify& m);
    void handle_encrypted(const stratum::MiningEncrypted& m);
    void apply_difficulty(double difficulty);

    void send_message(const stratum::StratumMessage& msg);
    void restart_production();
    void schedule_timing_share();
    void begin_pass();
    void schedule_batch();
    void process_batch(uint64_t epoch, netsim::SimTime batch_start);
    void submit_share(uint32_t nonce, const Bytes& extranonce2, const std::string& job_id,
                      uint32_t ntime);

    puzzle::PuzzleInput current_puzzle() const;

    netsim::SimClock& clock_;
    netsim::Network& net_;
    MinerConfig config_;
    netsim::EndpointAddr pool_addr_;
    netsim::LatencyModel latency_;
    Rng rng_;
    double hashrate_;

    netsim::Connection* conn_ = nullptr;
    std::string rx_buffer_;
    int64_t next_id_ = 0;
    int64_t subscribe_id_ = 0, authorize_id_ = 0;
    netsim::SimTime subscribe_sent_ = 0;
    double rtt_s_ = 0;
    bool authorized_ = false;

    Bytes extranonce1_;
    size_t extranonce2_size_ = 4;
    std::optional<puzzle::Difficulty> difficulty_;
    puzzle::Target target_;
    std::optional<pool::Job> job_;
    bool have_cookie_ = false;
    puzzle::Hash32 cookie_{};

    uint64_t work_epoch_ = 0;  // bumps on job/cookie/connection change

    // Real-hash pass state.
    Bytes pass_extranonce2_;
    uint32_t sequential_extranonce2_ = 0;
    std::optional<NoncePermutation> perm_;
    uint64_t sequential_cursor_ = 0;
    Bytes header_prefix_;

    Stats stats_;
};

}  // namespace stratlab::miner
