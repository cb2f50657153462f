#include "stratlab/netsim/clock.hpp"

#include <stdexcept>

namespace stratlab::netsim {

void SimClock::schedule_at(SimTime t, std::function<void()> fn) {
    if (t < now_) throw std::logic_error("cannot schedule into the past");
    queue_.push(Event{t, next_seq_++, std::move(fn)});
}

bool SimClock::step() {
    if (queue_.empty()) return false;
    Event e = queue_.top();
    queue_.pop();
    now_ = e.at;
    e.fn();
    return true;
}

void SimClock::run_until(SimTime t) {
    while (!queue_.empty() && queue_.top().at <= t) step();
    if (t > now_) now_ = t;
}

void SimClock::run_all() {
    while (step()) {
    }
}

}  // namespace stratlab::netsim
