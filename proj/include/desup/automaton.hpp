// Deterministic finite automata with partial transition functions.
//
// These are the plants and supervisors of supervisory control: a finite state
// set, a (partial) deterministic transition function, one initial state and a
// set of marked states. Marked states double as the *secret* states when an
// automaton is used as a plant in opacity problems.
//
// State ids are arbitrary (not necessarily dense): operations that remove
// states keep surviving ids unchanged, which lets callers track states across
// a pipeline of transformations.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "desup/alphabet.hpp"

namespace desup {

using StateId = std::uint32_t;

struct Transition {
    StateId src;
    EventId event;
    StateId dst;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// A word is a sequence of event ids over some alphabet.
using Word = std::vector<EventId>;

/// Deterministic automaton over an Alphabet. May be *null*: the empty
/// automaton with no states (and hence no initial state and empty language),
/// which several operations produce for degenerate inputs.
class Automaton {
public:
    /// Builds a validated automaton. States and marked states are sorted and
    /// deduplicated; transitions are sorted by (src, event). Throws
    /// std::invalid_argument if the initial state or any transition endpoint
    /// is unknown, an event id is out of range, or two transitions leave the
    /// same state on the same event (determinism).
    Automaton(Alphabet alphabet, std::vector<StateId> states, StateId initial,
              std::vector<StateId> marked, std::vector<Transition> transitions);

    /// The automaton with no states at all.
    static Automaton null_automaton(Alphabet alphabet);

    bool is_null() const { return states_.empty(); }

    const Alphabet& alphabet() const { return alphabet_; }

    /// All state ids in ascending order.
    const std::vector<StateId>& states() const { return states_; }

    std::size_t state_count() const { return states_.size(); }

    bool has_state(StateId q) const;

    /// Throws std::logic_error on the null automaton.
    StateId initial() const;

    /// Marked state ids in ascending order.
    const std::vector<StateId>& marked() const { return marked_; }

    bool is_marked(StateId q) const;

    /// All transitions, sorted by (src, event).
    const std::vector<Transition>& transitions() const { return transitions_; }

    /// The transitions leaving state q (contiguous in transitions()).
    std::span<const Transition> out_transitions(StateId q) const;

    /// delta(q, e), or nullopt when undefined.
    std::optional<StateId> target(StateId q, EventId e) const;

    friend bool operator==(const Automaton&, const Automaton&) = default;

private:
    Automaton() = default;

    Alphabet alphabet_;
    std::vector<StateId> states_;   // ascending
    StateId initial_ = 0;           // meaningful only when !is_null()
    std::vector<StateId> marked_;   // ascending subset of states_
    std::vector<Transition> transitions_;  // sorted by (src, event)
};

/// The accessible part: states reachable from the initial state, with
/// transitions and marking restricted accordingly. State ids are preserved.
/// accessible(null) = null.
Automaton accessible(const Automaton& g);

/// Natural projection: erases the events outside `observable`.
Word project(const Word& word, const EventSet& observable);

/// All states reachable from `from` by events outside `observable` (the
/// unobservable reach). Includes `from` itself; returned ascending. Throws
/// std::invalid_argument if `from` is not a state of g.
std::vector<StateId> epsilon_reach(const Automaton& g, StateId from,
                                   const EventSet& observable);

/// delta(initial, word), or nullopt when the run dies (or g is null).
std::optional<StateId> run_word(const Automaton& g, const Word& word);

/// All words of length <= max_len in the language of g, in shortlex order
/// (length first, then lexicographic by event id). Empty for the null
/// automaton; contains at least the empty word otherwise.
std::vector<Word> bounded_language(const Automaton& g, std::size_t max_len);

/// Whether s1 and s2 get the same response from g: both runs die, or both
/// land on the same state. Strings outside the language are all equivalent
/// to each other and to nothing else.
bool equiresponse_equivalent(const Automaton& g, const Word& s1, const Word& s2);

}  // namespace desup
