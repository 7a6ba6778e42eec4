// Parallel composition of a plant with its observer, and the invariant
// checks that make that composition usable as a supervisor skeleton.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "desup/automaton.hpp"
#include "desup/estimate.hpp"
#include "desup/observer.hpp"

namespace desup {

/// The identity of a product state independent of its numeric id: the plant
/// state it tracks plus the adversary estimate attached to it.
struct ProductPayload {
    StateId plant = 0;
    EstimateLabel estimate;

    friend bool operator==(const ProductPayload&, const ProductPayload&) = default;
    friend auto operator<=>(const ProductPayload&, const ProductPayload&) = default;
};

/// "q|{a,b,c}" — diagnostics only.
std::string to_string(const ProductPayload& payload);

/// A plant-observer product: a deterministic graph whose states carry
/// (plant state, estimate) payloads. Estimates are interned: the table holds
/// pairwise distinct labels and each state stores an index into it, so a
/// whole estimate class can be relabelled in one table write.
///
/// Graph state ids are dense 0..n-1 when freshly composed; operations that
/// remove states (refinement) preserve the surviving ids, so payloads stay
/// addressable by original id across a refinement pipeline.
class ProductAutomaton {
public:
    /// Null product over an empty alphabet (useful only as a placeholder).
    ProductAutomaton() = default;

    /// Validated constructor. `plant_by_id[i]` / `estimate_index_by_id[i]`
    /// give the payload of graph state i; both vectors must cover every id in
    /// the graph. Requires: estimate labels pairwise distinct; every state's
    /// plant component a member of its own estimate. Throws
    /// std::invalid_argument otherwise. Payloads need *not* be pairwise
    /// distinct: a fresh composition never repeats one, but refinement may
    /// split a payload across states whose enabled events differ.
    ProductAutomaton(Automaton graph, std::vector<StateId> plant_by_id,
                     std::vector<std::uint32_t> estimate_index_by_id,
                     std::vector<EstimateLabel> estimates);

    /// Null product that remembers its alphabet.
    static ProductAutomaton null_product(Alphabet alphabet);

    bool is_null() const { return graph_.is_null(); }

    const Automaton& graph() const { return graph_; }

    StateId plant_state(StateId product_id) const;

    std::uint32_t estimate_index(StateId product_id) const;

    const EstimateLabel& estimate(StateId product_id) const;

    const std::vector<EstimateLabel>& estimate_table() const { return estimates_; }

    ProductPayload payload(StateId product_id) const;

private:
    void check_state(StateId product_id) const;

    Automaton graph_ = Automaton::null_automaton(Alphabet{});
    std::vector<StateId> plant_by_id_;
    std::vector<std::uint32_t> estimate_index_by_id_;
    std::vector<EstimateLabel> estimates_;
};

/// Synchronous product of a plant with an observer of it. Events shared by
/// name must move both components; events private to one side move that side
/// alone. A product state is marked when both components are marked (plant
/// state marked *and* estimate all-marked). State ids are dense in
/// breadth-first discovery order. Throws std::invalid_argument when a shared
/// event's attributes disagree between the two alphabets.
ProductAutomaton parallel_compose(const Automaton& g, const ObserverAutomaton& h);

/// General synchronous product of two plain automata (marking = both marked).
Automaton parallel_compose(const Automaton& g1, const Automaton& g2);

/// Checks the defining property of plant-observer products on m: every
/// product state (q, A) is reached by some word s of length <= depth with
/// delta_g(s) = q, q is a member of A, and every plant state reachable by a
/// word of length <= depth with the same adversary projection as s lies in
/// A. Verified by an independent layered search, not by re-running the
/// subset construction.
bool check_state_consistency(const ProductAutomaton& m, const Automaton& g,
                             std::size_t depth);

/// Checks the state-partition property: determinizing the product graph
/// (viewed as a plant) must yield estimates that partition the product's
/// states — each product state belongs to exactly one reachable estimate of
/// the determinization. Holds for plant-observer products and is preserved
/// by refinement.
bool check_spa(const Automaton& g, const ProductAutomaton& m);

/// Id-independent description of a product. States are renumbered in
/// breadth-first discovery order, exploring out-edges in event-name order,
/// and the renumbered payloads, marking and transitions are printed one line
/// each. Deterministic accessible graphs that differ only in state ids get
/// identical forms; any payload or structural difference shows up as
/// differing lines. (Payloads alone cannot serve as state identity here:
/// refinement may split one payload across two states.)
struct CanonicalProduct {
    std::vector<std::string> lines;

    friend bool operator==(const CanonicalProduct&, const CanonicalProduct&) = default;
};

CanonicalProduct canonical_form(const ProductAutomaton& m);

bool canonically_equal(const ProductAutomaton& a, const ProductAutomaton& b);

/// Human-readable summary of the first few differences between the canonical
/// forms of a and b; empty when canonically equal.
std::string canonical_diff(const ProductAutomaton& a, const ProductAutomaton& b);

}  // namespace desup
