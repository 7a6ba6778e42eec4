// Independent oracles for differential testing.
//
// Everything here recomputes results "the slow, obvious way" — from the
// definitions, using only the public constructive operations — so the
// incremental algorithms have something honest to be compared against.

#pragma once

#include <cstdint>
#include <vector>

#include "desup/automaton.hpp"
#include "desup/product.hpp"
#include "desup/refine.hpp"

namespace desup {

/// Reference implementation of refine(): delete the requested states (and
/// their own naive uncontrollable closure) from the plant embedded in m,
/// re-run the subset construction on the shrunken plant, recompose, and map
/// the result back into plant-space payloads. Marking is carried over from
/// m's survivors, mirroring refine's contract. Quadratic-ish and proud of it.
ProductAutomaton naive_refine(const ProductAutomaton& m, const DeltaSet& delta);

struct RandomConfig {
    std::uint64_t seed = 0;
    std::size_t min_states = 2;
    std::size_t max_states = 8;
    std::size_t min_events = 1;
    std::size_t max_events = 4;
    double density = 0.5;          // P(transition present) per (state, event)
    double p_controllable = 0.5;   // P(event controllable)
    double p_observable = 0.5;     // P(event adversary-observable)
    double p_marked = 0.25;        // P(state marked)
};

/// Deterministic pseudo-random plant: same config (including seed), same
/// automaton, on every platform. Always accessible; initial state 0; events
/// named "a", "b", ... May be null only in the degenerate zero-state case
/// (excluded by RandomConfig's minimum).
Automaton random_automaton(const RandomConfig& cfg);

/// Deterministic pseudo-random subautomaton of g: drops some non-initial
/// states and some transitions, then takes the accessible part. The result
/// always satisfies is_subautomaton(result, g).
Automaton random_subautomaton(const Automaton& g, std::uint64_t seed);

/// Deterministic pseudo-random removal set for refine()'s differential
/// tests. The set is a fixpoint of two closures: forward reachability (no
/// transition leaves the set) and uncontrollable predecessors (the set is
/// its own uncontrollable closure). Removal sets of this shape make every
/// surviving estimate class shrink uniformly, so refine() and naive_refine()
/// agree exactly; an unshaped set can force the rebuilt observer to split an
/// estimate class into several states, which in-place relabelling cannot
/// express, and the two implementations then differ by design. May return an
/// empty set; may swallow the initial state (both sides then return null).
DeltaSet random_refinable_delta(const ProductAutomaton& m, std::uint64_t seed);

/// Exhaustive supervisor search on the plant-observer product, for tiny
/// instances. Enumerates every subset of the product's controllable
/// transitions, keeps the candidates whose accessible closed loop is
/// current-state opaque, and returns the maximal bounded closed-loop
/// languages among them (languages bounded to 2 * |product states|).
struct BruteForceResult {
    /// Maximal opaque closed-loop languages, pairwise incomparable, each in
    /// shortlex order; empty when no candidate is opaque.
    std::vector<std::vector<Word>> maximal_languages;
    std::uint64_t candidates = 0;
};

/// Throws std::invalid_argument when the product of g has more than
/// `max_controllable_edges` controllable transitions (the enumeration is
/// exponential in that count).
BruteForceResult brute_force_supervisors(const Automaton& g,
                                         std::size_t max_controllable_edges = 12);

/// Word-relation cross-checks between a plant g, its product with its own
/// observer, and a subautomaton g_sub (same state ids as g). Words of length
/// <= depth are covered, via synchronized state traversals rather than
/// literal enumeration.
struct RelationReport {
    /// Two words land on the same product state iff they land on the same
    /// plant state AND their projections land on the same observer state.
    bool match_equals_product_eq = false;

    /// Words landing on the same product state agree about surviving into
    /// g_sub: no product state is reached both by a word of L(g_sub) and by
    /// a word of L(g) \ L(g_sub).
    bool match_refines_rho = false;

    bool holds() const { return match_equals_product_eq && match_refines_rho; }
};

RelationReport relation_check(const Automaton& g, const Automaton& g_sub,
                              std::size_t depth);

}  // namespace desup
