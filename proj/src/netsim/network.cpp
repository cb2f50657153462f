#include "stratlab/netsim/network.hpp"

#include "stratlab/errors.hpp"

namespace stratlab::netsim {

using trace::flag::ACK;
using trace::flag::FIN;
using trace::flag::PSH;
using trace::flag::SYN;

// ---------------------------------------------------------------- Interposer

std::vector<Segment> Interposer::process(Dir d, Segment seg) {
    DirState& st = dirs_[size_t(d)];
    DirState& rev = dirs_[size_t(opposite(d))];

    if (seg.flags & SYN) {
        st.open = true;
        st.snd_view_next = seg.seq + 1;
        st.rcv_view_next = seg.seq + 1;
        return {seg};  // handshake passes untouched; deltas are zero here
    }

    Verdict v;
    if (!seg.payload.empty() && hook_) v = hook_(d, seg);

    uint32_t sent_len = uint32_t(seg.payload.size()) + ((seg.flags & FIN) ? 1 : 0);
    st.snd_view_next = seg.seq + sent_len;

    if (v.action == Action::drop) {
        st.delta -= int64_t(seg.payload.size());
        std::vector<Segment> out;
        for (const Bytes& extra : v.inject_after)
            if (!extra.empty()) out.push_back(fabricate(d, extra));
        return out;
    }

    Segment fwd = seg;
    if (v.action == Action::replace) fwd.payload = v.replacement;
    fwd.seq = uint32_t(seg.seq + uint64_t(st.delta));
    if (seg.flags & ACK) fwd.ack = uint32_t(seg.ack - uint64_t(rev.delta));

    st.rcv_view_next = fwd.seq + uint32_t(fwd.payload.size()) + ((fwd.flags & FIN) ? 1 : 0);
    st.delta += int64_t(fwd.payload.size()) - int64_t(seg.payload.size());

    std::vector<Segment> out{std::move(fwd)};
    for (const Bytes& extra : v.inject_after)
        if (!extra.empty()) out.push_back(fabricate(d, extra));
    return out;
}

Segment Interposer::fabricate(Dir d, ByteSpan payload) {
    DirState& st = dirs_[size_t(d)];
    DirState& rev = dirs_[size_t(opposite(d))];
    Side sender = side_of_sender(d);

    Segment seg;
    seg.src = conn_->ep(sender).addr;
    seg.dst = conn_->ep(sender == Side::client ? Side::server : Side::client).addr;
    seg.flags = PSH | ACK;
    seg.payload.assign(payload.begin(), payload.end());
    seg.seq = st.rcv_view_next;
    seg.ack = rev.snd_view_next;

    st.rcv_view_next += uint32_t(payload.size());
    st.delta += int64_t(payload.size());
    return seg;
}

void Interposer::inject(Dir d, ByteSpan payload) {
    if (!dirs_[0].open || !dirs_[1].open)
        throw StateError("cannot inject before the connection is established");
    if (payload.empty()) return;
    conn_->forward(d, fabricate(d, payload));
}

// ---------------------------------------------------------------- Connection

Connection::Connection(Network& net, EndpointAddr client, EndpointAddr server, LatencyModel latency)
    : net_(net), latency_(latency) {
    ep(Side::client).addr = std::move(client);
    ep(Side::server).addr = std::move(server);
    ep(Side::client).snd_next = net_.rng_.next_u32();
    ep(Side::server).snd_next = net_.rng_.next_u32();
}

Segment Connection::make_segment(Side from, uint8_t flags, ByteSpan payload) {
    Segment seg;
    seg.src = ep(from).addr;
    seg.dst = ep(from == Side::client ? Side::server : Side::client).addr;
    seg.flags = flags;
    seg.seq = ep(from).snd_next;
    if (flags & ACK) seg.ack = ep(from).rcv_next;
    seg.payload.assign(payload.begin(), payload.end());
    return seg;
}

void Connection::start_handshake() {
    transmit(Side::client, make_segment(Side::client, SYN, {}));
    ep(Side::client).snd_next += 1;  // SYN consumes one sequence number
}

void Connection::send(Side s, ByteSpan bytes) {
    if (!ep(s).established) throw StateError("send on an unestablished connection");
    if (ep(s).fin_sent) throw StateError("send after close");
    if (bytes.empty()) return;

    size_t split_at = bytes.size();
    if (net_.opts_.split_segments && bytes.size() >= 2)
        split_at = 1 + net_.rng_.next_below(bytes.size() - 1);

    for (size_t off = 0; off < bytes.size();) {
        size_t len = (off == 0 ? split_at : bytes.size() - off);
        Segment seg = make_segment(s, PSH | ACK, bytes.subspan(off, len));
        ep(s).snd_next += uint32_t(len);
        ep(s).bytes_sent += len;
        transmit(s, std::move(seg));
        off += len;
    }
}

void Connection::close(Side s) {
    if (!ep(s).established || ep(s).fin_sent) return;
    Segment seg = make_segment(s, FIN | ACK, {});
    ep(s).fin_sent = true;
    ep(s).snd_next += 1;
    transmit(s, std::move(seg));
}

void Connection::transmit(Side from, Segment seg) {
    Dir d = dir_from(from);
    if (interposer_) {
        for (Segment& out : interposer_->process(d, std::move(seg))) forward(d, std::move(out));
    } else {
        forward(d, std::move(seg));
    }
}

void Connection::forward(Dir d, Segment seg) {
    net_.capture(seg);
    if (seg.flags & trace::flag::RST) ++rst_count_;

    SimTime at = net_.clock_.now() + latency_.draw(net_.rng_);
    SimTime& floor = next_free_delivery_[size_t(d)];
    if (at < floor) at = floor;  // stream delivery stays in order
    floor = at;

    Side to = d == Dir::client_to_server ? Side::server : Side::client;
    net_.clock_.schedule_at(at, [this, to, seg = std::move(seg)]() mutable { deliver(to, std::move(seg)); });
}

void Connection::deliver(Side to, Segment seg) {
    Endpoint& dst = ep(to);
    Side from = to == Side::client ? Side::server : Side::client;

    if (seg.flags & SYN) {
        dst.rcv_next = seg.seq + 1;
        if (to == Side::server) {
            Segment synack = make_segment(Side::server, SYN | ACK, {});
            ep(Side::server).snd_next += 1;
            transmit(Side::server, std::move(synack));
        } else {
            dst.established = true;
            transmit(Side::client, make_segment(Side::client, ACK, {}));
            if (dst.on_established) dst.on_established();
        }
        return;
    }

    if (!seg.payload.empty()) {
        if (seg.seq != dst.rcv_next) ++gap_events_;
        dst.rcv_next = seg.seq + uint32_t(seg.payload.size());
        dst.bytes_received += seg.payload.size();
        if (!dst.fin_sent) transmit(to, make_segment(to, ACK, {}));
        if (dst.on_data) dst.on_data(ByteSpan(seg.payload));
        return;
    }

    if (seg.flags & FIN) {
        if (seg.seq != dst.rcv_next) ++gap_events_;
        dst.rcv_next = seg.seq + 1;
        dst.fin_received = true;
        if (!dst.fin_sent) {
            Segment fin = make_segment(to, FIN | ACK, {});
            dst.fin_sent = true;
            dst.snd_next += 1;
            transmit(to, std::move(fin));
        } else {
            transmit(to, make_segment(to, ACK, {}));
        }
        if (dst.on_closed) dst.on_closed();
        return;
    }

    // Bare ACK. The server completes its handshake on the first one.
    if (!dst.established && to == Side::server) {
        dst.established = true;
        if (dst.on_established) dst.on_established();
    }
    (void)from;
}

Interposer& Connection::attach_interposer() {
    if (!interposer_) {
        interposer_ = std::make_unique<Interposer>();
        interposer_->conn_ = this;
    }
    return *interposer_;
}

// ------------------------------------------------------------------- Network

Network::Network(SimClock& clock, trace::CaptureSink* sink, uint64_t seed, Options opts)
    : clock_(clock), sink_(sink), rng_(seed, "netsim"), opts_(opts) {}

Connection& Network::establish(EndpointAddr client, EndpointAddr server, LatencyModel latency) {
    if (client == server) throw ConfigError("connection endpoints must be distinct");
    auto conn = std::unique_ptr<Connection>(
        new Connection(*this, std::move(client), std::move(server), latency));
    conn->id_ = connections_.size();
    Connection& ref = *conn;
    connections_.push_back(std::move(conn));
    ref.start_handshake();
    return ref;
}

void Network::capture(const Segment& seg) {
    if (!sink_) return;
    trace::PacketRecord r;
    r.timestamp = clock_.now();
    r.src_ip = seg.src.ip;
    r.src_port = seg.src.port;
    r.dst_ip = seg.dst.ip;
    r.dst_port = seg.dst.port;
    r.flags = seg.flags;
    r.payload_len = uint32_t(seg.payload.size());
    r.payload = seg.payload;
    sink_->on_record(r);
}

}  // namespace stratlab::netsim
