// Supervisor synthesis for current-state opacity.
//
// A plant's marked states are its secrets. The plant is current-state opaque
// when no observation lets the adversary conclude "the plant is in a secret
// state right now". Synthesis finds the least restrictive supervisor whose
// closed loop is opaque, by iteratively deleting disclosing states from the
// plant-observer product and refining the product after each deletion.

#pragma once

#include <utility>
#include <vector>

#include "desup/product.hpp"
#include "desup/refine.hpp"

namespace desup {

/// Whether g is current-state opaque: no reachable adversary estimate
/// consists of marked states only. Vacuously true for the null automaton.
bool verify_current_state_opacity(const Automaton& g);

/// A synthesized supervisor, realized as a refined plant-observer product.
/// The realization's transitions *are* the control policy: a controllable
/// event is enabled in a supervisor state iff the realization defines it
/// there. A null realization means no opacity-enforcing supervisor exists.
struct Supervisor {
    ProductAutomaton realization;

    bool is_null() const { return realization.is_null(); }
};

/// One round of the synthesis loop, recorded for inspection.
struct RefinementStep {
    /// The disclosing (marked) product states targeted this round.
    std::vector<ProductPayload> delta;
    /// Everything actually removed: delta, its uncontrollable closure, and
    /// states left unreachable.
    std::vector<ProductPayload> removed;
    /// Estimate classes whose label shrank, as (before, after) pairs.
    std::vector<std::pair<EstimateLabel, EstimateLabel>> relabels;
};

struct SynthesisTrace {
    std::vector<RefinementStep> steps;
};

/// Least-restrictive opacity-enforcing supervisor for g, or a null
/// supervisor when none exists. Builds the plant-observer product once, then
/// alternates: remove the currently marked (disclosing) states via refine();
/// re-mark any state whose shrunken estimate became all-secret; stop when
/// nothing is marked. If `trace` is non-null, one RefinementStep is appended
/// per round.
Supervisor synthesize(const Automaton& g, SynthesisTrace* trace = nullptr);

/// Same fixpoint as synthesize(), computed state-at-a-time: a worklist of
/// disclosing states is drained while estimate classes are updated through a
/// hash table keyed by label, and reachability is maintained by live
/// in-degree counts plus a sweep for cycles each time the worklist empties.
/// Agrees with synthesize() up to canonical equality of the realization.
Supervisor synthesize_fast(const Automaton& g);

/// The control decision at one supervisor state: enabled[e] for every event
/// id of the plant alphabet. Uncontrollable events are always enabled;
/// controllable events are enabled iff the realization defines them there.
struct ControlPattern {
    std::vector<bool> enabled;
};

/// Throws std::invalid_argument if s is null or the state is unknown.
ControlPattern control_pattern(const Supervisor& s, StateId supervisor_state);

/// The closed-loop behaviour S/G: the plant constrained to the supervisor's
/// enabled events, marked wherever the *plant* component is marked (so
/// opacity of the controlled system can be checked directly on the result).
/// Null supervisor gives the null automaton.
Automaton closed_loop(const Supervisor& s, const Automaton& g);

}  // namespace desup
