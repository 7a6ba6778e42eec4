#include "desup/observer.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace desup {

const EstimateLabel& ObserverAutomaton::label_of(StateId observer_state) const {
    if (observer_state >= labels.size()) {
        throw std::invalid_argument("ObserverAutomaton::label_of: unknown state");
    }
    return labels[observer_state];
}

ObserverAutomaton observe(const Automaton& g) {
    // The observer lives over the adversary-observable slice of the alphabet.
    std::vector<Event> kept;
    for (const Event& e : g.alphabet().events()) {
        if (e.adversary_observable) {
            kept.push_back(e);
        }
    }
    Alphabet obs_alphabet(std::move(kept));

    if (g.is_null()) {
        return ObserverAutomaton{Automaton::null_automaton(std::move(obs_alphabet)), {}};
    }

    const EventSet observable = g.alphabet().adversary_observable();

    // Ids of observable events change between the two alphabets; map by name.
    std::vector<EventId> obs_event_of(g.alphabet().size(), 0);
    for (EventId e = 0; e < g.alphabet().size(); ++e) {
        if (auto oe = obs_alphabet.find(g.alphabet().event(e).name)) {
            obs_event_of[e] = *oe;
        }
    }

    std::unordered_map<EstimateLabel, StateId, EstimateLabelHash> id_of;
    std::vector<EstimateLabel> labels;
    std::deque<StateId> queue;
    auto intern = [&](EstimateLabel label) {
        auto [it, inserted] = id_of.try_emplace(std::move(label),
                                                static_cast<StateId>(labels.size()));
        if (inserted) {
            labels.push_back(it->first);
            queue.push_back(it->second);
        }
        return it->second;
    };

    intern(EstimateLabel(epsilon_reach(g, g.initial(), observable)));

    std::vector<Transition> transitions;
    while (!queue.empty()) {
        StateId id = queue.front();
        queue.pop_front();
        const EstimateLabel src = labels[id];  // copy: labels may reallocate
        for (EventId e = 0; e < g.alphabet().size(); ++e) {
            if (!observable.contains(e)) {
                continue;
            }
            std::vector<StateId> successors;
            for (StateId q : src.members()) {
                if (auto t = g.target(q, e)) {
                    auto reach = epsilon_reach(g, *t, observable);
                    successors.insert(successors.end(), reach.begin(), reach.end());
                }
            }
            if (successors.empty()) {
                continue;
            }
            StateId dst = intern(EstimateLabel(std::move(successors)));
            transitions.push_back({id, obs_event_of[e], dst});
        }
    }

    std::vector<StateId> states(labels.size());
    std::vector<StateId> marked;
    for (StateId i = 0; i < labels.size(); ++i) {
        states[i] = i;
        // Marked only when the estimate pins the plant to marked states.
        bool all_marked = std::all_of(labels[i].members().begin(), labels[i].members().end(),
                                      [&](StateId q) { return g.is_marked(q); });
        if (all_marked) {
            marked.push_back(i);
        }
    }

    Automaton graph(std::move(obs_alphabet), std::move(states), 0, std::move(marked),
                    std::move(transitions));
    return ObserverAutomaton{std::move(graph), std::move(labels)};
}

}  // namespace desup
