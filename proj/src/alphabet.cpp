#include "desup/alphabet.hpp"

#include <algorithm>
#include <stdexcept>

namespace desup {

void EventSet::insert(EventId e) {
    if (e >= member_.size()) {
        throw std::invalid_argument("EventSet::insert: event id out of range");
    }
    member_[e] = true;
}

std::size_t EventSet::count() const {
    return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), true));
}

Alphabet::Alphabet(std::vector<Event> events) : events_(std::move(events)) {
    for (const Event& e : events_) {
        if (e.name.empty()) {
            throw std::invalid_argument("Alphabet: empty event name");
        }
    }
    std::sort(events_.begin(), events_.end(),
              [](const Event& a, const Event& b) { return a.name < b.name; });
    auto dup = std::adjacent_find(
        events_.begin(), events_.end(),
        [](const Event& a, const Event& b) { return a.name == b.name; });
    if (dup != events_.end()) {
        throw std::invalid_argument("Alphabet: duplicate event name '" + dup->name + "'");
    }
}

std::optional<EventId> Alphabet::find(std::string_view name) const {
    auto it = std::lower_bound(events_.begin(), events_.end(), name,
                               [](const Event& e, std::string_view n) { return e.name < n; });
    if (it == events_.end() || it->name != name) {
        return std::nullopt;
    }
    return static_cast<EventId>(it - events_.begin());
}

EventSet Alphabet::adversary_observable() const {
    EventSet set(events_.size());
    for (EventId e = 0; e < events_.size(); ++e) {
        if (events_[e].adversary_observable) {
            set.insert(e);
        }
    }
    return set;
}

EventSet Alphabet::controllable() const {
    EventSet set(events_.size());
    for (EventId e = 0; e < events_.size(); ++e) {
        if (events_[e].controllable) {
            set.insert(e);
        }
    }
    return set;
}

}  // namespace desup
