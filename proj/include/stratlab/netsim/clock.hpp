#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace stratlab::netsim {

/// Simulated time in integer microseconds. Integer arithmetic keeps runs
/// bit-reproducible across platforms.
using SimTime = int64_t;

inline constexpr SimTime kMicrosPerSecond = 1'000'000;

inline double to_seconds(SimTime t) { return double(t) / kMicrosPerSecond; }
inline SimTime from_seconds(double s) { return SimTime(s * kMicrosPerSecond + 0.5); }

/// Discrete-event scheduler. Ties break in scheduling order, so a run is a
/// deterministic function of the seed.
class SimClock {
public:
    SimTime now() const { return now_; }

    void schedule_at(SimTime t, std::function<void()> fn);
    void schedule_in(SimTime dt, std::function<void()> fn) { schedule_at(now_ + dt, std::move(fn)); }

    /// Runs one pending event; false when the queue is empty.
    bool step();

    /// Processes every event scheduled at or before t, then sets now to t.
    void run_until(SimTime t);

    void run_all();

    size_t pending() const { return queue_.size(); }

private:
    struct Event {
        SimTime at;
        uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };

    SimTime now_ = 0;
    uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace stratlab::netsim
