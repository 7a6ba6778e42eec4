#include "desup/automaton.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace desup {

namespace {

void sort_unique(std::vector<StateId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool sorted_contains(const std::vector<StateId>& v, StateId q) {
    return std::binary_search(v.begin(), v.end(), q);
}

}  // namespace

Automaton::Automaton(Alphabet alphabet, std::vector<StateId> states, StateId initial,
                     std::vector<StateId> marked, std::vector<Transition> transitions)
    : alphabet_(std::move(alphabet)),
      states_(std::move(states)),
      initial_(initial),
      marked_(std::move(marked)),
      transitions_(std::move(transitions)) {
    if (states_.empty()) {
        throw std::invalid_argument(
            "Automaton: no states (use null_automaton for the null automaton)");
    }
    sort_unique(states_);
    sort_unique(marked_);
    if (!sorted_contains(states_, initial_)) {
        throw std::invalid_argument("Automaton: initial state " +
                                    std::to_string(initial_) + " is not a state");
    }
    for (StateId q : marked_) {
        if (!sorted_contains(states_, q)) {
            throw std::invalid_argument("Automaton: marked state " + std::to_string(q) +
                                        " is not a state");
        }
    }
    std::sort(transitions_.begin(), transitions_.end());
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        const Transition& t = transitions_[i];
        if (t.event >= alphabet_.size()) {
            throw std::invalid_argument("Automaton: transition event id out of range");
        }
        if (!sorted_contains(states_, t.src) || !sorted_contains(states_, t.dst)) {
            throw std::invalid_argument("Automaton: transition endpoint is not a state");
        }
        if (i > 0 && transitions_[i - 1].src == t.src && transitions_[i - 1].event == t.event) {
            throw std::invalid_argument(
                "Automaton: nondeterministic transitions from state " +
                std::to_string(t.src) + " on event '" +
                alphabet_.event(t.event).name + "'");
        }
    }
}

Automaton Automaton::null_automaton(Alphabet alphabet) {
    Automaton g;
    g.alphabet_ = std::move(alphabet);
    return g;
}

bool Automaton::has_state(StateId q) const { return sorted_contains(states_, q); }

StateId Automaton::initial() const {
    if (is_null()) {
        throw std::logic_error("Automaton::initial: null automaton");
    }
    return initial_;
}

bool Automaton::is_marked(StateId q) const { return sorted_contains(marked_, q); }

std::span<const Transition> Automaton::out_transitions(StateId q) const {
    auto lo = std::lower_bound(transitions_.begin(), transitions_.end(), q,
                               [](const Transition& t, StateId s) { return t.src < s; });
    auto hi = std::upper_bound(transitions_.begin(), transitions_.end(), q,
                               [](StateId s, const Transition& t) { return s < t.src; });
    return {transitions_.data() + (lo - transitions_.begin()),
            static_cast<std::size_t>(hi - lo)};
}

std::optional<StateId> Automaton::target(StateId q, EventId e) const {
    auto it = std::lower_bound(
        transitions_.begin(), transitions_.end(), std::pair<StateId, EventId>{q, e},
        [](const Transition& t, const std::pair<StateId, EventId>& key) {
            return std::pair<StateId, EventId>{t.src, t.event} < key;
        });
    if (it == transitions_.end() || it->src != q || it->event != e) {
        return std::nullopt;
    }
    return it->dst;
}

Automaton accessible(const Automaton& g) {
    if (g.is_null()) {
        return g;
    }
    std::unordered_set<StateId> seen{g.initial()};
    std::deque<StateId> queue{g.initial()};
    while (!queue.empty()) {
        StateId q = queue.front();
        queue.pop_front();
        for (const Transition& t : g.out_transitions(q)) {
            if (seen.insert(t.dst).second) {
                queue.push_back(t.dst);
            }
        }
    }
    std::vector<StateId> states;
    std::vector<StateId> marked;
    for (StateId q : g.states()) {
        if (seen.count(q)) {
            states.push_back(q);
            if (g.is_marked(q)) {
                marked.push_back(q);
            }
        }
    }
    std::vector<Transition> transitions;
    for (const Transition& t : g.transitions()) {
        if (seen.count(t.src)) {
            transitions.push_back(t);  // dst is reachable whenever src is
        }
    }
    return Automaton(g.alphabet(), std::move(states), g.initial(), std::move(marked),
                     std::move(transitions));
}

Word project(const Word& word, const EventSet& observable) {
    Word out;
    for (EventId e : word) {
        if (observable.contains(e)) {
            out.push_back(e);
        }
    }
    return out;
}

std::vector<StateId> epsilon_reach(const Automaton& g, StateId from,
                                   const EventSet& observable) {
    if (!g.has_state(from)) {
        throw std::invalid_argument("epsilon_reach: unknown state " + std::to_string(from));
    }
    std::unordered_set<StateId> seen{from};
    std::deque<StateId> queue{from};
    while (!queue.empty()) {
        StateId q = queue.front();
        queue.pop_front();
        for (const Transition& t : g.out_transitions(q)) {
            if (!observable.contains(t.event) && seen.insert(t.dst).second) {
                queue.push_back(t.dst);
            }
        }
    }
    std::vector<StateId> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<StateId> run_word(const Automaton& g, const Word& word) {
    if (g.is_null()) {
        return std::nullopt;
    }
    StateId q = g.initial();
    for (EventId e : word) {
        auto next = g.target(q, e);
        if (!next) {
            return std::nullopt;
        }
        q = *next;
    }
    return q;
}

std::vector<Word> bounded_language(const Automaton& g, std::size_t max_len) {
    std::vector<Word> words;
    if (g.is_null()) {
        return words;
    }
    // Breadth-first over words: the frontier holds (state, word) pairs of one
    // length; extending by events in id order keeps shortlex order.
    std::vector<std::pair<StateId, Word>> frontier{{g.initial(), Word{}}};
    words.push_back(Word{});
    for (std::size_t len = 0; len < max_len && !frontier.empty(); ++len) {
        std::vector<std::pair<StateId, Word>> next;
        for (const auto& [state, word] : frontier) {
            for (const Transition& t : g.out_transitions(state)) {
                Word extended = word;
                extended.push_back(t.event);
                words.push_back(extended);
                next.emplace_back(t.dst, std::move(extended));
            }
        }
        frontier = std::move(next);
    }
    return words;
}

bool equiresponse_equivalent(const Automaton& g, const Word& s1, const Word& s2) {
    auto a = run_word(g, s1);
    auto b = run_word(g, s2);
    if (!a || !b) {
        return !a && !b;
    }
    return *a == *b;
}

}  // namespace desup
