#include "stratlab/pool/pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stratlab/bedrock/envelope.hpp"
#include "stratlab/errors.hpp"

namespace stratlab::pool {

using netsim::SimTime;
using netsim::Side;
using puzzle::Difficulty;
using puzzle::Target;
using puzzle::U256;
using namespace stratum;

namespace {
constexpr uint32_t kGenesisTime = 1700000000;  // ntime base for simulated seconds

// Input-script dressing around the extranonces: a height push and a pool tag.
const Bytes kScriptPrefix = {0x03, 0x11, 0x22, 0x33, 0x08, 's', 't', 'r', 'a', 't', 'l', 'a', 'b'};
const Bytes kScriptSuffix = {0x2f, 0x73, 0x6c, 0x2f};
constexpr uint64_t kBlockRewardSatoshis = 1'250'000'000;  // 12.5 BTC
}  // namespace

double poisson_out_of_band(double mean, int lo_count, int hi_count) {
    if (mean <= 0) return 1.0;
    double pmf = std::exp(-mean);
    double in_band = 0;
    for (int i = 0; i <= hi_count; ++i) {
        if (i > 0) pmf *= mean / i;
        if (i >= lo_count) in_band += pmf;
    }
    return std::max(0.0, 1.0 - in_band);
}

Difficulty choose_difficulty(double hashrate_hs, const PoolPolicy& policy) {
    if (!(hashrate_hs > 0)) return policy.min_difficulty;
    double window = policy.vardiff_window_s;
    int lo = int(std::ceil(policy.rate_min_per_min * window / 60 - 1e-9));
    int hi = int(std::floor(policy.rate_max_per_min * window / 60 + 1e-9));
    if (lo < 0) lo = 0;
    if (hi < lo) hi = lo;

    double count_at_one = hashrate_hs * window / 4294967296.0;
    double ideal = count_at_one / std::sqrt(double(std::max(lo, 1)) * hi);
    int center = int(std::lround(std::log2(std::max(ideal, 1e-30))));
    center = std::clamp(center, -200, 200);

    int best_k = center;
    double best_p = 2.0;
    for (int k = center - 3; k <= center + 3; ++k) {
        double mean = count_at_one / std::ldexp(1.0, k);
        double p = poisson_out_of_band(mean, lo, hi);
        if (p < best_p - 1e-15 || (std::abs(p - best_p) <= 1e-15 && k > best_k)) {
            best_p = p;
            best_k = k;
        }
    }

    Difficulty d = best_k >= 0 ? Difficulty(U256::pow2(unsigned(best_k)), U256::one())
                               : Difficulty(U256::one(), U256::pow2(unsigned(-best_k)));
    if (d < policy.min_difficulty) return policy.min_difficulty;
    return d;
}

// ------------------------------------------------------------- PayoutLedger

void PayoutLedger::credit(const std::string& username, const Difficulty& d) {
    credit_[username] += d.to_double();
}

double PayoutLedger::credit_of(const std::string& username) const {
    auto it = credit_.find(username);
    return it == credit_.end() ? 0.0 : it->second;
}

std::vector<PayoutLedger::Settlement> PayoutLedger::settle(double period_start_s,
                                                           double period_end_s,
                                                           double pps_rate_btc_per_ths_day) {
    std::vector<Settlement> out;
    double period = period_end_s - period_start_s;
    if (period <= 0) return out;
    for (auto& [username, credit] : credit_) {
        double effective_hashrate = credit * 4294967296.0 / period;
        double daily_btc = puzzle::payout_from_hashrate(effective_hashrate, pps_rate_btc_per_ths_day);
        out.push_back({username, daily_btc * (period / 86400.0), period_start_s, period_end_s});
        credit = 0;
    }
    return out;
}

// ---------------------------------------------------------------- PoolServer

PoolServer::PoolServer(netsim::SimClock& clock, PoolPolicy policy, uint64_t run_seed)
    : clock_(clock), policy_(std::move(policy)), rng_(run_seed, "pool") {
    block_target_ = puzzle::difficulty_to_target(policy_.block_difficulty);
    nbits_ = puzzle::target_to_nbits(block_target_);
    make_job(true);
    schedule_job_timer();
    schedule_tip_timer();
    schedule_settle_timer();
}

void PoolServer::schedule_settle_timer() {
    clock_.schedule_in(netsim::from_seconds(policy_.payout_period_s), [this] {
        settle_now();
        schedule_settle_timer();
    });
}

void PoolServer::provision_key(const std::string& username, const crypto::Key& key) {
    provisioned_keys_[username] = key;
}

void PoolServer::attach(netsim::Connection& conn) {
    auto session = std::make_unique<Session>();
    session->conn = &conn;
    session->conn_id = conn.id();
    session->difficulty = policy_.min_difficulty;
    session->target = puzzle::difficulty_to_target(session->difficulty);
    uint64_t id = conn.id();
    sessions_[id] = std::move(session);

    conn.set_data_handler(Side::server, [this, id](ByteSpan data) {
        auto it = sessions_.find(id);
        if (it == sessions_.end()) return;
        Session& s = *it->second;
        s.rx_buffer.append(reinterpret_cast<const char*>(data.data()), data.size());
        size_t pos;
        while ((pos = s.rx_buffer.find('\n')) != std::string::npos) {
            std::string line = s.rx_buffer.substr(0, pos + 1);
            s.rx_buffer.erase(0, pos + 1);
            on_line(id, line);
            if (!sessions_.count(id)) return;  // session died while handling
        }
    });
    conn.set_closed_handler(Side::server, [this, id] { sessions_.erase(id); });
}

void PoolServer::on_line(uint64_t conn_id, std::string_view line) {
    auto it = sessions_.find(conn_id);
    if (it == sessions_.end()) return;
    StratumMessage msg;
    try {
        msg = decode(line);
    } catch (const CodecError&) {
        ++counters_.protocol_errors;
        return;
    }
    handle_message(*it->second, msg);
}

void PoolServer::handle_message(Session& s, const StratumMessage& msg) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Subscribe>) handle_subscribe(s, m);
            else if constexpr (std::is_same_v<T, Authorize>) handle_authorize(s, m);
            else if constexpr (std::is_same_v<T, Submit>) handle_submit(s, m);
            else if constexpr (std::is_same_v<T, MiningEncrypted>) handle_encrypted(s, m);
            else if constexpr (std::is_same_v<T, Unknown>) { /* forward compatibility */ }
            else ++counters_.protocol_errors;  // server-bound stream carried a pool-role message
        },
        msg);
}

void PoolServer::send_message(Session& s, const StratumMessage& msg) {
    std::string line = encode(msg);
    if (policy_.all_encrypt && s.authorized && s.have_key &&
        !std::holds_alternative<MiningEncrypted>(msg)) {
        bedrock::ParamList raw{{"raw", line}};
        line = encode(bedrock::encrypt_params(s.key, raw, rng_));
    }
    s.conn->send(Side::server, to_bytes(line));
}

void PoolServer::send_result(Session& s, int64_t id, bool ok,
                             std::optional<std::pair<int, std::string>> error) {
    StatusResult r;
    r.id = id;
    r.accepted = ok;
    r.error = std::move(error);
    send_message(s, r);
}

void PoolServer::handle_subscribe(Session& s, const Subscribe& m) {
    if (s.subscribed) {
        ++counters_.protocol_errors;
        send_result(s, m.id, false, {{20, "duplicate subscribe"}});
        return;
    }
    s.subscribed = true;
    if (policy_.fidelity_extranonce1) {
        s.extranonce1 = {0x30, 0x30};
    } else {
        s.extranonce1.resize(8);
        rng_.fill(s.extranonce1.data(), s.extranonce1.size());
    }
    s.extranonce2_size = 4;

    SubscribeResult r;
    r.id = m.id;
    r.subscriptions = {{"mining.set_difficulty", "d1"}, {"mining.notify", "n1"}};
    r.extranonce1 = s.extranonce1;
    r.extranonce2_size = s.extranonce2_size;
    send_message(s, r);
}

void PoolServer::handle_authorize(Session& s, const Authorize& m) {
    if (!s.subscribed) {
        ++counters_.protocol_errors;
        send_result(s, m.id, false, {{25, "not subscribed"}});
        return;
    }
    if (s.authorized) {
        send_result(s, m.id, true);
        return;
    }
    size_t dot = m.username.find('.');
    bool well_formed = dot != std::string::npos && dot > 0 && dot + 1 < m.username.size() &&
                       m.username.find('.', dot + 1) == std::string::npos;
    if (!well_formed) {
        send_result(s, m.id, false, {{24, "username must be account.minerID"}});
        return;
    }

    s.username = m.username;
    s.bedrock = policy_.bedrock;
    if (auto it = provisioned_keys_.find(s.username); it != provisioned_keys_.end()) {
        s.key = it->second;
        s.have_key = true;
    }
    if (s.bedrock && !s.have_key) {
        ++counters_.protocol_errors;
        send_result(s, m.id, false, {{24, "no shared key for miner"}});
        return;
    }
    s.authorized = true;
    send_result(s, m.id, true);

    if (s.bedrock) {
        generate_cookie(s);
        s.awaiting_hashrate_report = true;
        uint64_t epoch = ++s.report_epoch;
        uint64_t id = s.conn_id;
        clock_.schedule_in(netsim::from_seconds(policy_.hashrate_report_timeout_s),
                           [this, id, epoch] {
                               auto it = sessions_.find(id);
                               if (it == sessions_.end() || it->second->report_epoch != epoch) return;
                               after_report_or_timeout(*it->second, std::nullopt);
                           });
    } else {
        set_session_difficulty(s, policy_.min_difficulty);
        if (current_job_) send_job(s, *current_job_, true);
        start_inference(s);
    }
}

void PoolServer::after_report_or_timeout(Session& s, std::optional<double> reported_hashrate) {
    if (!s.awaiting_hashrate_report) return;
    s.awaiting_hashrate_report = false;
    Difficulty d =
        reported_hashrate ? choose_difficulty(*reported_hashrate, policy_) : policy_.min_difficulty;
    set_session_difficulty(s, d);
    if (current_job_) send_job(s, *current_job_, true);
    start_vardiff_window(s);
}

void PoolServer::generate_cookie(Session& s) {
    if (!s.have_key) throw StateError("cookie generation requires an established key");
    rng_.fill(s.cookie_seed.data(), s.cookie_seed.size());
    s.cookie = bedrock::derive_cookie(s.cookie_seed, s.username);
    s.have_cookie = true;
    bedrock::ParamList params{{"secret", to_hex(s.cookie_seed)}};
    send_message(s, bedrock::encrypt_params(s.key, params, rng_));
    if (on_bedrock_event) on_bedrock_event("cookie", s.username, clock_.now());
}

void PoolServer::set_session_difficulty(Session& s, const Difficulty& d) {
    s.difficulty = d;
    s.target = puzzle::difficulty_to_target(d);
    s.difficulty_sent = true;
    if (s.bedrock) {
        bedrock::ParamList params{{"difficulty", d.to_double()}};
        send_message(s, bedrock::encrypt_params(s.key, params, rng_));
    } else {
        SetDifficulty m;
        m.difficulty = d.to_double();
        send_message(s, m);
    }
    if (on_difficulty_change) on_difficulty_change(s.username, clock_.now(), d.to_double());
}

void PoolServer::send_job(Session& s, const Job& job, bool force_clean) {
    bool clean = job.clean || force_clean;
    if (clean) s.active_jobs.clear();
    s.active_jobs[job.id] = current_job_ && current_job_->id == job.id
                                ? current_job_
                                : std::make_shared<const Job>(job);

    Notify n;
    n.job_id = job.id;
    n.prev_hash = job.prev_block_hash;
    n.coinbase1 = job.coinbase1;
    n.coinbase2 = job.coinbase2;
    n.merkle_branches = job.merkle_branches;
    n.version = job.version;
    n.nbits = job.nbits;
    n.ntime = job.ntime;
    n.clean_jobs = clean;
    send_message(s, n);
}

void PoolServer::start_inference(Session& s) {
    s.inference_active = true;
    s.window_start = clock_.now();
    s.window_accepted = 0;
    uint64_t epoch = ++s.inference_epoch;
    uint64_t id = s.conn_id;
    clock_.schedule_in(netsim::from_seconds(policy_.inference_timeout_s), [this, id, epoch] {
        auto it = sessions_.find(id);
        if (it == sessions_.end()) return;
        Session& ses = *it->second;
        if (!ses.inference_active || ses.inference_epoch != epoch) return;
        conclude_inference(ses);
    });
}

void PoolServer::conclude_inference(Session& s) {
    s.inference_active = false;
    double elapsed_s = netsim::to_seconds(clock_.now() - s.window_start);
    Difficulty d_new = s.difficulty;
    if (s.window_accepted >= 2 && elapsed_s > 0) {
        double mean_share_time = elapsed_s / s.window_accepted;
        double hashrate = puzzle::hashrate_from_time(s.difficulty, mean_share_time);
        d_new = choose_difficulty(hashrate, policy_);
    }
    set_session_difficulty(s, d_new);
    start_vardiff_window(s);
}

void PoolServer::start_vardiff_window(Session& s) {
    s.vardiff_start = clock_.now();
    s.vardiff_count = 0;
    uint64_t epoch = ++s.vardiff_epoch;
    uint64_t id = s.conn_id;
    clock_.schedule_in(netsim::from_seconds(policy_.vardiff_window_s), [this, id, epoch] {
        auto it = sessions_.find(id);
        if (it == sessions_.end() || it->second->vardiff_epoch != epoch) return;
        vardiff_tick(*it->second);
    });
}

void PoolServer::vardiff_tick(Session& s) {
    double window = policy_.vardiff_window_s;
    int lo = int(std::ceil(policy_.rate_min_per_min * window / 60 - 1e-9));
    int hi = int(std::floor(policy_.rate_max_per_min * window / 60 + 1e-9));

    s.vardiff_recent[2] = s.vardiff_recent[1];
    s.vardiff_recent[1] = s.vardiff_recent[0];
    s.vardiff_recent[0] = s.vardiff_count;
    ++s.vardiff_windows_seen;

    bool in_band = s.vardiff_count >= lo && s.vardiff_count <= hi;
    s.vardiff_out_streak = in_band ? 0 : s.vardiff_out_streak + 1;

    // Two consecutive out-of-band windows re-estimate from recent counts;
    // a single excursion is expected Poisson noise.
    if (s.vardiff_out_streak >= 2) {
        int windows = std::min(s.vardiff_windows_seen, 3);
        long total = 0;
        for (int i = 0; i < windows; ++i) total += s.vardiff_recent[i];
        double span_s = windows * window;
        double hashrate = std::max<long>(total, 1) * s.difficulty.to_double() * 4294967296.0 / span_s;
        Difficulty d_new = choose_difficulty(hashrate, policy_);
        if (!(d_new == s.difficulty)) set_session_difficulty(s, d_new);
        s.vardiff_out_streak = 0;
    }
    start_vardiff_window(s);
}

void PoolServer::handle_submit(Session& s, const Submit& m) {
    if (!s.authorized) {
        ++counters_.protocol_errors;
        send_result(s, m.id, false, {{24, "unauthorized"}});
        return;
    }
    if (m.username != s.username) {
        ++s.rejected;
        ++counters_.rejected;
        send_result(s, m.id, false, {{24, "worker does not match session"}});
        return;
    }
    auto it = s.active_jobs.find(m.job_id);
    if (it == s.active_jobs.end()) {
        ++s.rejected;
        ++counters_.rejected;
        send_result(s, m.id, false, {{21, "stale work"}});
        return;
    }
    if (m.extranonce2.size() != s.extranonce2_size) {
        ++s.rejected;
        ++counters_.rejected;
        send_result(s, m.id, false, {{20, "malformed extranonce2"}});
        return;
    }

    const Job& job = *it->second;
    bool ok = true;
    bool block = false;
    if (policy_.verify_shares) {
        puzzle::PuzzleInput input = puzzle_for(s, job, m.ntime);
        puzzle::ShareSolution sol{m.nonce, m.extranonce2, m.job_id};
        U256 value = puzzle::hash_to_int(puzzle::share_hash(input, sol));
        ok = value < s.target.value;
        block = ok && value < block_target_.value;
    }
    if (!ok) {
        ++s.rejected;
        ++counters_.rejected;
        send_result(s, m.id, false, {{23, "low difficulty share"}});
        return;
    }
    if (policy_.ignore_fraction > 0 && rng_.next_unit() < policy_.ignore_fraction) {
        ++s.ignored;
        ++counters_.ignored;
        return;  // no status result, no credit
    }

    ledger_.credit(s.username, s.difficulty);
    ++s.accepted;
    ++counters_.accepted;
    send_result(s, m.id, true);

    if (s.inference_active) {
        ++s.window_accepted;
        if (s.window_accepted >= policy_.inference_share_quota) conclude_inference(s);
    } else {
        ++s.vardiff_count;
    }
    if (block) on_block_mined(s);
}

void PoolServer::handle_encrypted(Session& s, const MiningEncrypted& m) {
    if (!s.authorized || !s.have_key) {
        ++counters_.protocol_errors;
        return;
    }
    auto params = bedrock::decrypt_params(s.key, m);
    if (!params) {
        ++counters_.protocol_errors;  // authentication failure flags the session
        return;
    }
    for (const auto& [name, value] : *params) {
        if (name == "hashrate" && value.is_number()) {
            if (on_bedrock_event) on_bedrock_event("hashrate_report", s.username, clock_.now());
            after_report_or_timeout(s, value.get<double>());
        } else if (name == "raw" && value.is_string()) {
            uint64_t id = s.conn_id;
            on_line(id, value.get<std::string>());
            if (!sessions_.count(id)) return;
        }
    }
}

void PoolServer::on_block_mined(Session& s) {
    ++counters_.blocks_mined;
    // The winning share publishes the coinbase, so the cookie is burned.
    if (s.bedrock) generate_cookie(s);
    make_job(true);
}

puzzle::PuzzleInput PoolServer::puzzle_for(const Session& s, const Job& job, uint32_t ntime) const {
    puzzle::PuzzleInput input;
    input.version = job.version;
    input.prev_block_hash = job.prev_block_hash;
    input.merkle_branches = job.merkle_branches;
    input.timestamp = ntime;
    input.nbits = job.nbits;
    input.coinbase.coinbase1 = job.coinbase1;
    input.coinbase.coinbase2 = job.coinbase2;
    input.coinbase.extranonce1 = s.extranonce1;
    input.coinbase.extranonce2_size = s.extranonce2_size;
    if (s.bedrock && s.have_cookie) puzzle::write_cookie_region(input.coinbase, s.cookie);
    return input;
}

bool PoolServer::verify_job_reference(const Job& job, ByteSpan extranonce1,
                                      const puzzle::Hash32& cookie_seed, const std::string& username,
                                      uint32_t ntime, uint32_t nonce, ByteSpan extranonce2,
                                      const Target& target) {
    puzzle::Hash32 cookie = bedrock::derive_cookie(cookie_seed, username);
    puzzle::CoinbaseParts parts;
    parts.coinbase1 = job.coinbase1;
    parts.coinbase2 = job.coinbase2;
    parts.extranonce1.assign(extranonce1.begin(), extranonce1.end());
    parts.extranonce2_size = extranonce2.size();
    parts = bedrock::embed_cookie(std::move(parts), cookie);

    puzzle::PuzzleInput input;
    input.version = job.version;
    input.prev_block_hash = job.prev_block_hash;
    input.merkle_branches = job.merkle_branches;
    input.timestamp = ntime;
    input.nbits = job.nbits;
    input.coinbase = std::move(parts);

    puzzle::ShareSolution sol;
    sol.nonce = nonce;
    sol.extranonce2.assign(extranonce2.begin(), extranonce2.end());
    sol.job_id = job.id;
    return puzzle::check_share(input, sol, target);
}

void PoolServer::make_job(bool clean) {
    auto job = std::make_shared<Job>();
    char idbuf[24];
    std::snprintf(idbuf, sizeof(idbuf), "j%06llx", static_cast<unsigned long long>(next_job_serial_++));
    job->id = idbuf;
    job->clean = clean;
    job->ntime = kGenesisTime + uint32_t(clock_.now() / netsim::kMicrosPerSecond);
    job->nbits = nbits_;
    if (clean || !current_job_) {
        rng_.fill(job->prev_block_hash.data(), job->prev_block_hash.size());
    } else {
        job->prev_block_hash = current_job_->prev_block_hash;
    }
    size_t branch_count = rng_.next_below(4);
    for (size_t i = 0; i < branch_count; ++i) {
        puzzle::Hash32 b;
        rng_.fill(b.data(), b.size());
        job->merkle_branches.push_back(b);
    }
    size_t en1_len = policy_.fidelity_extranonce1 ? 2 : 8;
    Bytes dummy_en1(en1_len, 0);
    puzzle::CoinbaseParts tmpl = puzzle::make_coinbase_template(
        ByteSpan(kScriptPrefix), ByteSpan(kScriptSuffix), ByteSpan(dummy_en1), 4,
        kBlockRewardSatoshis);
    job->coinbase1 = std::move(tmpl.coinbase1);
    job->coinbase2 = std::move(tmpl.coinbase2);

    current_job_ = std::move(job);
    for (auto& [id, session] : sessions_) {
        if (session->authorized && session->difficulty_sent) send_job(*session, *current_job_, false);
    }
}

void PoolServer::schedule_job_timer() {
    clock_.schedule_in(netsim::from_seconds(policy_.job_interval_s), [this] {
        make_job(false);
        schedule_job_timer();
    });
}

void PoolServer::schedule_tip_timer() {
    if (policy_.tip_mean_s <= 0) return;
    double dt = rng_.next_exponential(policy_.tip_mean_s);
    clock_.schedule_in(netsim::from_seconds(dt), [this] {
        make_job(true);
        schedule_tip_timer();
    });
}

void PoolServer::settle_now() {
    double now_s = netsim::to_seconds(clock_.now());
    if (now_s <= last_settle_s_) return;
    auto paid = ledger_.settle(last_settle_s_, now_s, policy_.pps_rate_btc_per_ths_day);
    settlements_.insert(settlements_.end(), paid.begin(), paid.end());
    last_settle_s_ = now_s;
}

PoolServer::SessionSecrets PoolServer::secrets_for(const std::string& username) const {
    for (const auto& [id, session] : sessions_) {
        if (session->username == username && session->have_cookie)
            return {session->cookie_seed, session->cookie, true};
    }
    return {};
}

}  // namespace stratlab::pool
