// The adversary's view of a plant: determinized observation automaton.

#pragma once

#include <vector>

#include "desup/automaton.hpp"
#include "desup/estimate.hpp"

namespace desup {

/// A determinized observer. `graph` has dense state ids 0..n-1 assigned in
/// breadth-first discovery order; `labels[i]` is the estimate represented by
/// state i. The graph's alphabet is the plant alphabet restricted to the
/// adversary-observable events.
struct ObserverAutomaton {
    Automaton graph;
    std::vector<EstimateLabel> labels;

    const EstimateLabel& label_of(StateId observer_state) const;
};

/// Subset construction over the adversary-observable events. The initial
/// estimate is the unobservable reach of the plant's initial state; each
/// observable event maps an estimate A to the union of unobservable reaches
/// of the successors of A's members. An observer state is *marked* only when
/// every member of its estimate is marked in the plant — i.e. when the
/// observation discloses with certainty that the plant is in a marked
/// (secret) state. observe(null) is the null observer.
ObserverAutomaton observe(const Automaton& g);

}  // namespace desup
