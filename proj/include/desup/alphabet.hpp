// Event alphabets for discrete-event systems.
//
// Every event carries two independent attributes: whether the supervisor can
// disable it (controllable) and whether the adversary observes it
// (adversary_observable). Alphabets keep their events sorted by name so that
// event ids are canonical for a given set of events.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace desup {

using EventId = std::uint32_t;

struct Event {
    std::string name;
    bool controllable = false;
    bool adversary_observable = false;

    friend bool operator==(const Event&, const Event&) = default;
};

/// A subset of the event ids of one alphabet, stored as a membership bitmap.
class EventSet {
public:
    EventSet() = default;
    explicit EventSet(std::size_t universe) : member_(universe, false) {}

    std::size_t universe() const { return member_.size(); }

    bool contains(EventId e) const { return e < member_.size() && member_[e]; }

    void insert(EventId e);

    std::size_t count() const;

private:
    std::vector<bool> member_;
};

/// An immutable, name-sorted event alphabet. Event ids are indices into the
/// sorted order, so two alphabets built from the same events (in any order)
/// assign identical ids.
class Alphabet {
public:
    Alphabet() = default;

    /// Sorts the events by name. Throws std::invalid_argument on duplicate or
    /// empty names.
    explicit Alphabet(std::vector<Event> events);

    std::size_t size() const { return events_.size(); }

    const Event& event(EventId e) const { return events_.at(e); }

    const std::vector<Event>& events() const { return events_; }

    /// Id of the event with the given name, if present.
    std::optional<EventId> find(std::string_view name) const;

    /// The set of adversary-observable event ids.
    EventSet adversary_observable() const;

    /// The set of controllable event ids.
    EventSet controllable() const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::vector<Event> events_;
};

}  // namespace desup
