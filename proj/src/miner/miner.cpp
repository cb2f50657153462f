#include "stratlab/miner/miner.hpp"

#include <cmath>

#include "stratlab/bedrock/envelope.hpp"
#include "stratlab/errors.hpp"

namespace stratlab::miner {

using netsim::SimTime;
using netsim::Side;
using namespace stratum;

Miner::Miner(netsim::SimClock& clock, netsim::Network& net, MinerConfig config,
             netsim::EndpointAddr pool_addr, netsim::LatencyModel latency, uint64_t run_seed)
    : clock_(clock),
      net_(net),
      config_(std::move(config)),
      pool_addr_(std::move(pool_addr)),
      latency_(latency),
      rng_(run_seed, "miner/" + config_.username),
      hashrate_(config_.resolved_hashrate()) {
    if (!(hashrate_ > 0)) throw ConfigError("miner needs a frequency or hashrate");
    if (config_.mode == MinerConfig::Mode::real_hash && config_.nonce_space_bits % 2 != 0)
        throw ConfigError("nonce space bits must be even (feistel halves)");
}

void Miner::start() {
    clock_.schedule_at(netsim::from_seconds(config_.connect_time_s), [this] { connect(); });
}

void Miner::connect() {
    ++stats_.sessions;
    netsim::EndpointAddr me{config_.ip, uint16_t(config_.base_port + stats_.sessions - 1)};
    conn_ = &net_.establish(me, pool_addr_, latency_);
    rx_buffer_.clear();
    authorized_ = false;
    difficulty_.reset();
    job_.reset();
    have_cookie_ = false;
    ++work_epoch_;

    netsim::Connection* conn = conn_;
    if (on_connection) on_connection(*conn);

    conn->set_data_handler(Side::client, [this, conn](ByteSpan data) {
        if (conn != conn_) return;  // stale connection
        rx_buffer_.append(reinterpret_cast<const char*>(data.data()), data.size());
        size_t pos;
        while ((pos = rx_buffer_.find('\n')) != std::string::npos) {
            std::string line = rx_buffer_.substr(0, pos + 1);
            rx_buffer_.erase(0, pos + 1);
            on_line(line);
        }
    });
    conn->set_established_handler(Side::client, [this, conn] {
        if (conn != conn_) return;
        Subscribe m;
        m.id = subscribe_id_ = ++next_id_;
        m.capabilities = {"stratlab-miner/1.0"};
        subscribe_sent_ = clock_.now();
        send_message(m);
    });
    conn->set_closed_handler(Side::client, [this, conn] {
        if (conn != conn_) return;
        conn_ = nullptr;
        ++work_epoch_;
        if (config_.reconnect_every_s > 0)
            clock_.schedule_in(netsim::from_seconds(config_.reconnect_delay_s), [this] { connect(); });
    });

    if (config_.reconnect_every_s > 0) {
        netsim::SimTime planned = clock_.now() + netsim::from_seconds(config_.reconnect_every_s);
        clock_.schedule_at(planned, [this, conn] {
            if (conn == conn_ && conn->established(Side::client) && !conn->closed(Side::client))
                conn->close(Side::client);
        });
    }
}

void Miner::send_message(const StratumMessage& msg) {
    if (!conn_) return;
    std::string line = encode(msg);
    if (config_.all_encrypt && authorized_ && config_.have_key &&
        !std::holds_alternative<MiningEncrypted>(msg)) {
        bedrock::ParamList raw{{"raw", line}};
        line = encode(bedrock::encrypt_params(config_.key, raw, rng_, /*from_miner=*/true));
    }
    conn_->send(Side::client, to_bytes(line));
}

void Miner::on_line(std::string_view line) {
    StratumMessage msg;
    try {
        msg = decode(line);
    } catch (const CodecError&) {
        return;
    }
    handle(msg);
}

void Miner::handle(const StratumMessage& msg) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SubscribeResult>) {
                extranonce1_ = m.extranonce1;
                extranonce2_size_ = m.extranonce2_size;
                rtt_s_ = netsim::to_seconds(clock_.now() - subscribe_sent_);
                Authorize a;
                a.id = authorize_id_ = ++next_id_;
                a.username = config_.username;
                a.password = config_.password;
                send_message(a);
            } else if constexpr (std::is_same_v<T, StatusResult>) {
                handle_result(m);
            } else if constexpr (std::is_same_v<T, SetDifficulty>) {
                apply_difficulty(m.difficulty);
            } else if constexpr (std::is_same_v<T, Notify>) {
                handle_notify(m);
            } else if constexpr (std::is_same_v<T, MiningEncrypted>) {
                handle_encrypted(m);
            }
        },
        msg);
}

void Miner::handle_result(const StatusResult& m) {
    if (m.id == authorize_id_) {
        if (!m.accepted) return;  // nothing sensible to do; stay idle
        authorized_ = true;
        if (config_.bedrock && config_.have_key) {
            HashrateEstimate est = estimate_own_hashrate();
            stats_.last_estimate = est;
            // The self-test runs on the device before it can report.
            uint64_t epoch = work_epoch_;
            clock_.schedule_in(netsim::from_seconds(est.selftest_elapsed_s), [this, epoch, est] {
                if (epoch != work_epoch_ || !conn_) return;
                bedrock::ParamList params{{"hashrate", est.adjusted_hs}};
                send_message(bedrock::encrypt_params(config_.key, params, rng_, /*from_miner=*/true));
            });
        }
        return;
    }
    if (m.accepted) ++stats_.accepted;
    else ++stats_.rejected;
}

void Miner::handle_notify(const Notify& m) {
    if (!m.clean_jobs && job_) return;  // keep working the current job

    pool::Job j;
    j.id = m.job_id;
    j.version = m.version;
    j.prev_block_hash = m.prev_hash;
    j.coinbase1 = m.coinbase1;
    j.coinbase2 = m.coinbase2;
    j.merkle_branches = m.merkle_branches;
    j.ntime = m.ntime;
    j.nbits = m.nbits;
    j.clean = m.clean_jobs;
    job_ = std::move(j);
    restart_production();
}

void Miner::handle_encrypted(const MiningEncrypted& m) {
    if (!config_.have_key) return;
    auto params = bedrock::decrypt_params(config_.key, m);
    if (!params) return;
    for (const auto& [name, value] : *params) {
        if (name == "difficulty" && value.is_number()) {
            apply_difficulty(value.get<double>());
        } else if (name == "secret" && value.is_string()) {
            Bytes seed_bytes = from_hex(value.get<std::string>());
            if (seed_bytes.size() != cookie_.size()) continue;
            puzzle::Hash32 seed;
            std::copy(seed_bytes.begin(), seed_bytes.end(), seed.begin());
            cookie_ = bedrock::derive_cookie(seed, config_.username);
            have_cookie_ = true;
            restart_production();  // the cookie is part of the preimage
        } else if (name == "raw" && value.is_string()) {
            on_line(value.get<std::string>());
        }
    }
}

void Miner::apply_difficulty(double difficulty) {
    difficulty_ = puzzle::Difficulty::from_double(difficulty);
    target_ = puzzle::difficulty_to_target(*difficulty_);
    if (config_.mode == MinerConfig::Mode::timing_model) {
        ++work_epoch_;  // redraw the interval at the new mean
        schedule_timing_share();
    }
    // Real-hash passes keep running; only the acceptance threshold moved.
}

void Miner::restart_production() {
    ++work_epoch_;
    if (!job_ || !difficulty_) return;
    if (config_.bedrock && !have_cookie_) return;
    if (config_.mode == MinerConfig::Mode::timing_model) {
        schedule_timing_share();
    } else {
        begin_pass();
        schedule_batch();
    }
}

void Miner::schedule_timing_share() {
    if (!job_ || !difficulty_) return;
    double mean_s = puzzle::expected_hashes(*difficulty_) / hashrate_;
    SimTime dt = netsim::from_seconds(rng_.next_exponential(mean_s));
    if (dt < 1) dt = 1;
    uint64_t epoch = work_epoch_;
    clock_.schedule_in(dt, [this, epoch] {
        if (epoch != work_epoch_ || !conn_ || !job_) return;
        Bytes en2(extranonce2_size_);
        rng_.fill(en2.data(), en2.size());
        submit_share(rng_.next_u32(), en2, job_->id, job_->ntime);
        schedule_timing_share();
    });
}

puzzle::PuzzleInput Miner::current_puzzle() const {
    puzzle::PuzzleInput input;
    input.version = job_->version;
    input.prev_block_hash = job_->prev_block_hash;
    input.merkle_branches = job_->merkle_branches;
    input.timestamp = job_->ntime;
    input.nbits = job_->nbits;
    input.coinbase.coinbase1 = job_->coinbase1;
    input.coinbase.coinbase2 = job_->coinbase2;
    input.coinbase.extranonce1 = extranonce1_;
    input.coinbase.extranonce2_size = extranonce2_size_;
    if (config_.bedrock && have_cookie_) puzzle::write_cookie_region(input.coinbase, cookie_);
    return input;
}

void Miner::begin_pass() {
    if (config_.sequential_iteration) {
        Bytes en2(extranonce2_size_, 0);
        for (size_t i = 0; i < en2.size() && i < 4; ++i)
            en2[i] = uint8_t(sequential_extranonce2_ >> (8 * i));
        pass_extranonce2_ = en2;
        sequential_cursor_ = 0;
        perm_.reset();
    } else {
        pass_extranonce2_.resize(extranonce2_size_);
        rng_.fill(pass_extranonce2_.data(), pass_extranonce2_.size());
        perm_.emplace(rng_.next_u64(), config_.nonce_space_bits);
    }
    puzzle::PuzzleInput input = current_puzzle();
    puzzle::Hash32 txid = puzzle::coinbase_txid(input, pass_extranonce2_);
    puzzle::Hash32 root = puzzle::merkle_root(txid, input.merkle_branches);
    header_prefix_ = puzzle::serialize_header_prefix(input, root);
}

void Miner::schedule_batch() {
    uint64_t epoch = work_epoch_;
    uint64_t space = uint64_t(1) << config_.nonce_space_bits;
    uint64_t remaining = config_.sequential_iteration ? space - sequential_cursor_
                                                      : perm_->remaining();
    uint32_t batch = uint32_t(std::min<uint64_t>(config_.hash_batch, remaining));
    if (batch == 0) {
        // Nonce space exhausted: move to the next extranonce2 and go on.
        if (config_.sequential_iteration) ++sequential_extranonce2_;
        begin_pass();
        schedule_batch();
        return;
    }
    SimTime start = clock_.now();
    SimTime dt = netsim::from_seconds(double(batch) / hashrate_);
    if (dt < 1) dt = 1;
    clock_.schedule_in(dt, [this, epoch, start] { process_batch(epoch, start); });
}

void Miner::process_batch(uint64_t epoch, SimTime batch_start) {
    if (epoch != work_epoch_ || !conn_ || !job_) return;

    uint64_t space = uint64_t(1) << config_.nonce_space_bits;
    uint64_t remaining = config_.sequential_iteration ? space - sequential_cursor_
                                                      : perm_->remaining();
    uint32_t batch = uint32_t(std::min<uint64_t>(config_.hash_batch, remaining));

    std::vector<uint32_t> nonces(batch);
    if (config_.sequential_iteration) {
        for (uint32_t i = 0; i < batch; ++i) nonces[i] = uint32_t(sequential_cursor_ + i);
        sequential_cursor_ += batch;
    } else {
        for (uint32_t i = 0; i < batch; ++i) nonces[i] = perm_->next();
    }

    std::vector<uint8_t> digests(size_t(batch) * 32);
    crypto::best_scan()(header_prefix_.data(), nonces.data(), batch, digests.data());
    stats_.hashes_done += batch;

    const std::string job_id = job_->id;
    const uint32_t ntime = job_->ntime;
    const Bytes en2 = pass_extranonce2_;
    for (uint32_t i = 0; i < batch; ++i) {
        crypto::Digest d;
        std::copy_n(digests.begin() + size_t(i) * 32, 32, d.begin());
        if (puzzle::hash_to_int(d) < target_.value) {
            // The i-th candidate finished i+1 hashes into the batch.
            SimTime found_at = batch_start + netsim::from_seconds(double(i + 1) / hashrate_);
            if (found_at < clock_.now()) found_at = clock_.now();
            uint32_t nonce = nonces[i];
            clock_.schedule_at(found_at, [this, epoch, nonce, en2, job_id, ntime] {
                if (epoch != work_epoch_ || !conn_) return;
                submit_share(nonce, en2, job_id, ntime);
            });
        }
    }
    schedule_batch();
}

void Miner::submit_share(uint32_t nonce, const Bytes& extranonce2, const std::string& job_id,
                         uint32_t ntime) {
    Submit m;
    m.id = ++next_id_;
    m.username = config_.username;
    m.job_id = job_id;
    m.ntime = ntime;
    m.nonce = nonce;
    m.extranonce2 = extranonce2;
    ++stats_.shares_sent;
    send_message(m);
}

HashrateEstimate Miner::estimate_own_hashrate() {
    HashrateEstimate est;
    est.rtt_s = rtt_s_;
    int n = config_.selftest_samples;
    double mean_per_sample_s = config_.selftest_duration_s / std::max(n, 1);
    double selftest_difficulty = hashrate_ * mean_per_sample_s / 4294967296.0;

    if (config_.mode == MinerConfig::Mode::timing_model) {
        double total_s = 0;
        for (int i = 0; i < n; ++i) total_s += rng_.next_exponential(mean_per_sample_s);
        est.selftest_elapsed_s = total_s;
        est.raw_hs = selftest_difficulty * 4294967296.0 * n / total_s;
    } else {
        // Execute random jobs locally and count work per share.
        puzzle::Target t = puzzle::difficulty_to_target(puzzle::Difficulty::from_double(selftest_difficulty));
        uint8_t header[76];
        rng_.fill(header, sizeof(header));
        uint64_t hashes = 0;
        int found = 0;
        std::vector<uint32_t> nonces(1024);
        std::vector<uint8_t> digests(nonces.size() * 32);
        uint32_t cursor = 0;
        while (found < n) {
            for (auto& v : nonces) v = cursor++;
            crypto::best_scan()(header, nonces.data(), uint32_t(nonces.size()), digests.data());
            for (size_t i = 0; i < nonces.size() && found < n; ++i) {
                ++hashes;
                crypto::Digest d;
                std::copy_n(digests.begin() + i * 32, 32, d.begin());
                if (puzzle::hash_to_int(d) < t.value) ++found;
            }
            if (cursor == 0) rng_.fill(header, sizeof(header));  // wrapped: fresh job
        }
        est.selftest_elapsed_s = double(hashes) / hashrate_;
        est.raw_hs = selftest_difficulty * 4294967296.0 * n / est.selftest_elapsed_s;
    }
    // Amortize one job-fetch round trip over the measurement window.
    est.adjusted_hs = est.raw_hs * (est.selftest_elapsed_s / (est.selftest_elapsed_s + est.rtt_s));
    return est;
}

}  // namespace stratlab::miner
