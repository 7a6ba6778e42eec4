// Shared helpers for the test binaries: fixture loading, a compact automaton
// builder, and payload lookup in products.

#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "desup/automaton.hpp"
#include "desup/desa.hpp"
#include "desup/estimate.hpp"
#include "desup/product.hpp"

namespace desup::testing {

inline std::string fixture_path(const std::string& name) {
    return std::string(DESUP_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture_file(const std::string& name) {
    return fixture_path(name);
}

/// Loads a plant fixture. Fixture state names are chosen so that sorted-name
/// order equals numeric order (q0 < q1 < ..., q01 < q02 < ...), hence state
/// ids match the number in the name minus its offset.
inline PlantDocument load_fixture(const std::string& name) {
    DesaDocument doc = parse_desa_file(fixture_path(name));
    return std::get<PlantDocument>(std::move(doc));
}

inline Automaton load_plant(const std::string& name) {
    return load_fixture(name).automaton;
}

/// Fluent builder for inline test automata. Events resolve by name against
/// the (name-sorted) alphabet at build() time, so declaration order does not
/// matter and event ids are stable.
class Builder {
public:
    Builder& event(std::string name, bool controllable, bool observable) {
        events_.push_back({std::move(name), controllable, observable});
        return *this;
    }

    Builder& states(std::initializer_list<StateId> ids) {
        states_.assign(ids);
        return *this;
    }

    Builder& initial(StateId q) {
        initial_ = q;
        return *this;
    }

    Builder& marked(std::initializer_list<StateId> ids) {
        marked_.assign(ids);
        return *this;
    }

    Builder& trans(StateId src, const std::string& event_name, StateId dst) {
        trans_.emplace_back(src, event_name, dst);
        return *this;
    }

    Automaton build() const {
        Alphabet alphabet{events_};
        std::vector<Transition> transitions;
        transitions.reserve(trans_.size());
        for (const auto& [src, name, dst] : trans_) {
            auto event = alphabet.find(name);
            if (!event) {
                throw std::logic_error("Builder: unknown event " + name);
            }
            transitions.push_back({src, *event, dst});
        }
        return Automaton{alphabet, states_, initial_, marked_, transitions};
    }

private:
    std::vector<Event> events_;
    std::vector<StateId> states_;
    StateId initial_ = 0;
    std::vector<StateId> marked_;
    std::vector<std::tuple<StateId, std::string, StateId>> trans_;
};

/// Event id by name; the event must exist.
inline EventId eid(const Automaton& g, std::string_view name) {
    auto id = g.alphabet().find(name);
    if (!id) {
        throw std::logic_error("eid: unknown event " + std::string(name));
    }
    return *id;
}

/// All product states carrying the given payload (several after a split).
inline std::vector<StateId> states_with_payload(const ProductAutomaton& m,
                                                StateId plant,
                                                std::vector<StateId> members) {
    ProductPayload wanted{plant, EstimateLabel{std::move(members)}};
    std::vector<StateId> found;
    for (StateId q : m.graph().states()) {
        if (m.payload(q) == wanted) {
            found.push_back(q);
        }
    }
    return found;
}

/// The unique product state carrying the given payload; throws otherwise.
inline StateId the_state(const ProductAutomaton& m, StateId plant,
                         std::vector<StateId> members) {
    auto found = states_with_payload(m, plant, std::move(members));
    if (found.size() != 1) {
        throw std::logic_error("the_state: payload not unique (" +
                               std::to_string(found.size()) + " matches)");
    }
    return found.front();
}

/// Five-state plant whose refinement exercises payload splitting: removing
/// the shaped set split_delta() from its product leaves two *pairs* of
/// surviving states that agree on (plant component, estimate) but differ in
/// their outgoing transitions, and merges two estimate classes into one.
inline Automaton split_plant() {
    return Builder{}
        .event("a", true, true)
        .event("b", false, false)
        .states({0, 1, 2, 3, 4})
        .initial(0)
        .marked({2, 3, 4})
        .trans(0, "a", 4)
        .trans(0, "b", 0)
        .trans(1, "a", 3)
        .trans(2, "a", 4)
        .trans(2, "b", 3)
        .trans(3, "a", 2)
        .trans(3, "b", 0)
        .trans(4, "a", 1)
        .trans(4, "b", 0)
        .build();
}

/// A removal set for split_plant()'s product (ids in composition order) that
/// is closed forward and under uncontrollable predecessors: every state whose
/// estimate mentions plant 2 or 3, i.e. everything "past" the first two a's.
inline std::vector<StateId> split_delta() {
    return {2, 4, 6, 7, 10, 11, 12, 13, 14};
}

}  // namespace desup::testing
