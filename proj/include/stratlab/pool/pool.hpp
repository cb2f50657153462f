#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "stratlab/bedrock/cookie.hpp"
#include "stratlab/netsim/network.hpp"
#include "stratlab/pool/policy.hpp"
#include "stratlab/puzzle/puzzle.hpp"
#include "stratlab/rng.hpp"
#include "stratlab/stratum/codec.hpp"

namespace stratlab::pool {

/// A broadcast work template. Sessions splice their own extranonce1 (and, in
/// Bedrock mode, their cookie) into the coinbase when verifying.
struct Job {
    std::string id;
    uint32_t version = 0x20000000;
    puzzle::Hash32 prev_block_hash{};
    Bytes coinbase1;
    Bytes coinbase2;
    std::vector<puzzle::Hash32> merkle_branches;
    uint32_t ntime = 0;
    uint32_t nbits = 0;
    bool clean = false;
};

/// Per-user accepted-share credit under PPS; settlement converts credit to
/// an effective hashrate, then to BTC at the published rate.
class PayoutLedger {
public:
    void credit(const std::string& username, const puzzle::Difficulty& d);
    double credit_of(const std::string& username) const;

    struct Settlement {
        std::string username;
        double btc = 0;
        double period_start_s = 0;
        double period_end_s = 0;
    };

    /// Pays every user with credit and resets the period's counters.
    std::vector<Settlement> settle(double period_start_s, double period_end_s,
                                   double pps_rate_btc_per_ths_day);

private:
    std::map<std::string, double> credit_;  // Σ accepted difficulty
};

class PoolServer {
public:
    PoolServer(netsim::SimClock& clock, PoolPolicy policy, uint64_t run_seed);

    /// Takes the server side of the connection; the session lives until FIN.
    void attach(netsim::Connection& conn);

    /// Out-of-band key provisioning (Bedrock / all-encrypt modes).
    void provision_key(const std::string& username, const crypto::Key& key);

    PayoutLedger& ledger() { return ledger_; }
    const std::vector<PayoutLedger::Settlement>& settlements() const { return settlements_; }

    /// Settles the period ending now; the scenario runner calls this at the
    /// end of a run for the final partial period.
    void settle_now();

    const PoolPolicy& policy() const { return policy_; }

    // Ground-truth taps for the sidecar.
    std::function<void(const std::string& username, netsim::SimTime, double difficulty)>
        on_difficulty_change;
    std::function<void(const std::string& kind, const std::string& username, netsim::SimTime)>
        on_bedrock_event;

    struct Counters {
        int64_t accepted = 0;
        int64_t rejected = 0;
        int64_t ignored = 0;
        int64_t blocks_mined = 0;
        int64_t protocol_errors = 0;
    };
    const Counters& counters() const { return counters_; }

    /// Bedrock session snapshot for tests (empty when unknown).
    struct SessionSecrets {
        puzzle::Hash32 cookie_seed{};
        puzzle::Hash32 cookie{};
        bool valid = false;
    };
    SessionSecrets secrets_for(const std::string& username) const;

    /// Direct transcription of the cookie-verified share check, used by the
    /// differential tests against handle_submit's code path.
    static bool verify_job_reference(const Job& job, ByteSpan extranonce1,
                                     const puzzle::Hash32& cookie_seed, const std::string& username,
                                     uint32_t ntime, uint32_t nonce, ByteSpan extranonce2,
                                     const puzzle::Target& target);

private:
    struct Session {
        netsim::Connection* conn = nullptr;
        uint64_t conn_id = 0;
        bool subscribed = false;
        bool authorized = false;
        std::string username;
        Bytes extranonce1;
        size_t extranonce2_size = 4;

        puzzle::Difficulty difficulty;
        puzzle::Target target;

        bool inference_active = false;
        netsim::SimTime window_start = 0;
        int window_accepted = 0;
        uint64_t inference_epoch = 0;

        netsim::SimTime vardiff_start = 0;
        int vardiff_count = 0;
        int vardiff_recent[3] = {0, 0, 0};  // last windows, newest first
        int vardiff_windows_seen = 0;
        int vardiff_out_streak = 0;
        uint64_t vardiff_epoch = 0;

        std::map<std::string, std::shared_ptr<const Job>> active_jobs;

        bool bedrock = false;
        bool have_key = false;
        crypto::Key key{};
        bool have_cookie = false;
        puzzle::Hash32 cookie_seed{};
        puzzle::Hash32 cookie{};
        bool difficulty_sent = false;
        bool awaiting_hashrate_report = false;
        uint64_t report_epoch = 0;

        int64_t accepted = 0, rejected = 0, ignored = 0;
        std::string rx_buffer;
    };

    void on_line(uint64_t conn_id, std::string_view line);
    void handle_message(Session& s, const stratum::StratumMessage& msg);
    void handle_subscribe(Session& s, const stratum::Subscribe& m);
    void handle_authorize(Session& s, const stratum::Authorize& m);
    void handle_submit(Session& s, const stratum::Submit& m);
    void handle_encrypted(Session& s, const stratum::MiningEncrypted& m);

    void send_message(Session& s, const stratum::StratumMessage& msg);
    void send_result(Session& s, int64_t id, bool ok,
                     std::optional<std::pair<int, std::string>> error = std::nullopt);
    void set_session_difficulty(Session& s, const puzzle::Difficulty& d);
    void send_job(Session& s, const Job& job, bool force_clean);
    void start_inference(Session& s);
    void conclude_inference(Session& s);
    void start_vardiff_window(Session& s);
    void vardiff_tick(Session& s);
    void generate_cookie(Session& s);
    void after_report_or_timeout(Session& s, std::optional<double> reported_hashrate);

    void make_job(bool clean);
    void schedule_job_timer();
    void schedule_tip_timer();
    void schedule_settle_timer();
    void on_block_mined(Session& s);

    puzzle::PuzzleInput puzzle_for(const Session& s, const Job& job, uint32_t ntime) const;

    netsim::SimClock& clock_;
    PoolPolicy policy_;
    Rng rng_;
    puzzle::Target block_target_;
    uint32_t nbits_ = 0;

    std::map<uint64_t, std::unique_ptr<Session>> sessions_;  // conn id → session
    std::map<std::string, crypto::Key> provisioned_keys_;
    std::shared_ptr<const Job> current_job_;
    uint64_t next_job_serial_ = 0;

    PayoutLedger ledger_;
    std::vector<PayoutLedger::Settlement> settlements_;
    double last_settle_s_ = 0;
    Counters counters_;
};

}  // namespace stratlab::pool
