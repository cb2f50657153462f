#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "stratlab/netsim/clock.hpp"
#include "stratlab/rng.hpp"
#include "stratlab/trace/record.hpp"

namespace stratlab::netsim {

struct EndpointAddr {
    std::string ip;
    uint16_t port = 0;
    friend bool operator==(const EndpointAddr&, const EndpointAddr&) = default;
};

/// TCP-shaped wire event. seq/ack arithmetic is modulo 2^32; PSH is set
/// exactly on payload-bearing segments.
struct Segment {
    uint32_t seq = 0;
    uint32_t ack = 0;
    uint8_t flags = 0;
    Bytes payload;
    EndpointAddr src, dst;
};

struct LatencyModel {
    SimTime one_way = 0;
    double jitter_exp_mean_s = 0;  // exponential jitter added per segment; 0 disables

    SimTime draw(Rng& rng) const {
        SimTime t = one_way;
        if (jitter_exp_mean_s > 0) t += from_seconds(rng.next_exponential(jitter_exp_mean_s));
        return t;
    }
};

enum class Side { client = 0, server = 1 };
enum class Dir { client_to_server = 0, server_to_client = 1 };

inline Side side_of_sender(Dir d) { return d == Dir::client_to_server ? Side::client : Side::server; }
inline Dir dir_from(Side s) { return s == Side::client ? Dir::client_to_server : Dir::server_to_client; }
inline Dir opposite(Dir d) {
    return d == Dir::client_to_server ? Dir::server_to_client : Dir::client_to_server;
}

class Connection;

/// Man-in-the-middle seat on a connection. Every passing segment is
/// seq/ack-rewritten by the cumulative per-direction byte deltas, so the
/// endpoints keep seeing gap-free streams across payload edits, drops and
/// injections; no segment is ever reset.
class Interposer {
public:
    enum class Action { pass, drop, replace };
    struct Verdict {
        Action action = Action::pass;
        Bytes replacement;                 // used when action == replace
        std::vector<Bytes> inject_after;   // extra payloads fabricated after this segment
    };
    /// Called for payload-bearing segments only (handshake and bare acks
    /// pass through with rewriting).
    using Hook = std::function<Verdict(Dir, const Segment&)>;

    void set_hook(Hook h) { hook_ = std::move(h); }

    /// Fabricates a payload segment with the receiver's next expected seq.
    /// Empty payload is a no-op. Throws StateError before the handshake.
    void inject(Dir d, ByteSpan payload);

    /// Cumulative receiver-view minus sender-view offset for a direction
    /// (insertions positive, removals negative).
    int64_t delta(Dir d) const { return dirs_[size_t(d)].delta; }

private:
    friend class Connection;

    struct DirState {
        int64_t delta = 0;
        uint32_t snd_view_next = 0;  // sender's stream position, sender frame
        uint32_t rcv_view_next = 0;  // forwarded stream position, receiver frame
        bool open = false;           // set once the SYN passed
    };

    std::vector<Segment> process(Dir d, Segment seg);
    Segment fabricate(Dir d, ByteSpan payload);

    DirState dirs_[2];
    Hook hook_;
    Connection* conn_ = nullptr;
};

/// In-process duplex stream with TCP-like sequencing and a capture tap.
/// Segments are captured post-interposer, stamped at origination time.
class Connection {
public:
    using DataHandler = std::function<void(ByteSpan)>;
    using Handler = std::function<void()>;

    void set_data_handler(Side s, DataHandler h) { ep(s).on_data = std::move(h); }
    void set_established_handler(Side s, Handler h) { ep(s).on_established = std::move(h); }
    void set_closed_handler(Side s, Handler h) { ep(s).on_closed = std::move(h); }

    /// One app write = one segment (two in split mode). Requires the side to
    /// be established and not closed.
    void send(Side s, ByteSpan bytes);
    void close(Side s);

    bool established(Side s) const { return ep(s).established; }
    bool closed(Side s) const { return ep(s).fin_sent && ep(s).fin_received; }
    const EndpointAddr& addr(Side s) const { return ep(s).addr; }

    Interposer& attach_interposer();
    Interposer* interposer() { return interposer_.get(); }

    uint64_t bytes_sent(Side s) const { return ep(s).bytes_sent; }
    uint64_t bytes_received(Side s) const { return ep(s).bytes_received; }

    /// Sequential per-network id; stable across identically seeded runs.
    uint64_t id() const { return id_; }

    /// Sequence discontinuities observed by the endpoints; stays zero as
    /// long as interposer bookkeeping is correct.
    int gap_events() const { return gap_events_; }
    int rst_count() const { return rst_count_; }

private:
    friend class Network;
    friend class Interposer;

    struct Endpoint {
        EndpointAddr addr;
        uint32_t snd_next = 0;
        uint32_t rcv_next = 0;
        bool established = false;
        bool fin_sent = false;
        bool fin_received = false;
        uint64_t bytes_sent = 0;
        uint64_t bytes_received = 0;
        DataHandler on_data;
        Handler on_established;
        Handler on_closed;
    };

    Connection(class Network& net, EndpointAddr client, EndpointAddr server, LatencyModel latency);

    Endpoint& ep(Side s) { return endpoints_[size_t(s)]; }
    const Endpoint& ep(Side s) const { return endpoints_[size_t(s)]; }

    void start_handshake();
    void transmit(Side from, Segment seg);
    void forward(Dir d, Segment seg);
    void deliver(Side to, Segment seg);
    Segment make_segment(Side from, uint8_t flags, ByteSpan payload);

    class Network& net_;
    uint64_t id_ = 0;
    Endpoint endpoints_[2];
    LatencyModel latency_;
    std::unique_ptr<Interposer> interposer_;
    SimTime next_free_delivery_[2] = {0, 0};  // per-direction in-order delivery
    int gap_events_ = 0;
    int rst_count_ = 0;
};

class Network {
public:
    struct Options {
        bool split_segments = false;  // parser-hardening mode: one write → two segments
    };

    Network(SimClock& clock, trace::CaptureSink* sink, uint64_t seed, Options opts = {});

    /// Emits the SYN / SYN+ACK / ACK exchange onto the capture feed and
    /// returns the connection; establishment callbacks fire as the
    /// handshake completes under the latency model.
    Connection& establish(EndpointAddr client, EndpointAddr server, LatencyModel latency);

    SimClock& clock() { return clock_; }
    const Options& options() const { return opts_; }

private:
    friend class Connection;
    friend class Interposer;

    void capture(const Segment& seg);

    SimClock& clock_;
    trace::CaptureSink* sink_;
    Rng rng_;
    Options opts_;
    std::vector<std::unique_ptr<Connection>> connections_;
};

}  // namespace stratlab::netsim
