#include "desup/relations.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>
#include <utility>

namespace desup {

namespace {

std::uint64_t pair_key(StateId a, StateId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

bool is_subautomaton(const Automaton& sub, const Automaton& parent, std::size_t depth) {
    if (sub.alphabet() != parent.alphabet()) {
        return false;
    }
    if (sub.is_null()) {
        return true;  // the empty language imposes no constraints
    }
    if (parent.is_null()) {
        return false;  // sub's empty word has no counterpart
    }
    if (!std::includes(parent.states().begin(), parent.states().end(),
                       sub.states().begin(), sub.states().end())) {
        return false;
    }
    if (sub.initial() != parent.initial()) {
        return false;
    }
    // Walk sub's reachable part; every edge must exist identically in the
    // parent. Determinism then forces delta agreement on all of sub's words.
    std::unordered_set<StateId> seen{sub.initial()};
    std::deque<std::pair<StateId, std::size_t>> queue{{sub.initial(), 0}};
    while (!queue.empty()) {
        auto [q, dist] = queue.front();
        queue.pop_front();
        if (dist >= depth) {
            continue;
        }
        for (const Transition& t : sub.out_transitions(q)) {
            if (parent.target(t.src, t.event) != t.dst) {
                return false;
            }
            if (seen.insert(t.dst).second) {
                queue.emplace_back(t.dst, dist + 1);
            }
        }
    }
    return true;
}

bool is_subautomaton(const Automaton& sub, const Automaton& parent) {
    // Every state is first reached within |sub states| steps, so this depth
    // is exhaustive.
    return is_subautomaton(sub, parent, sub.state_count());
}

bool is_subobserver(const ObserverAutomaton& sub, const ObserverAutomaton& parent) {
    if (sub.graph.alphabet() != parent.graph.alphabet()) {
        return false;
    }
    if (sub.graph.is_null()) {
        return true;
    }
    if (parent.graph.is_null()) {
        return false;
    }
    // Joint walk over words of sub's language. A sub state can pair with
    // several parent states (via different words), hence the pair set.
    std::unordered_set<std::uint64_t> seen;
    std::deque<std::pair<StateId, StateId>> queue;
    queue.emplace_back(sub.graph.initial(), parent.graph.initial());
    seen.insert(pair_key(sub.graph.initial(), parent.graph.initial()));
    while (!queue.empty()) {
        auto [a, b] = queue.front();
        queue.pop_front();
        if (!sub.label_of(a).subset_of(parent.label_of(b))) {
            return false;
        }
        for (const Transition& t : sub.graph.out_transitions(a)) {
            auto tb = parent.graph.target(b, t.event);
            if (!tb) {
                return false;  // parent must respond to every word of sub
            }
            if (seen.insert(pair_key(t.dst, *tb)).second) {
                queue.emplace_back(t.dst, *tb);
            }
        }
    }
    return true;
}

}  // namespace desup
