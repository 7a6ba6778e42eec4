// Incremental refinement of plant-observer products.
//
// Removing states from a plant invalidates its observer: estimates may
// mention plant states that no longer exist. Rather than re-running the
// subset construction, refine() repairs the product in place — it removes the
// requested states together with everything forced out with them, and shrinks
// every estimate by exactly the plant states that left its class.

#pragma once

#include <vector>

#include "desup/product.hpp"

namespace desup {

/// A set of product state ids, sorted ascending and duplicate-free.
using DeltaSet = std::vector<StateId>;

/// The backward closure of `delta` under uncontrollable transitions: all
/// states that can reach a delta state by a (possibly empty) chain of
/// uncontrollable transitions. A supervisor cannot keep the plant out of
/// `delta` without also avoiding these. Result sorted ascending; throws
/// std::invalid_argument on unknown ids.
DeltaSet uncontrollable_closure(const ProductAutomaton& m, const DeltaSet& delta);

/// Removes the states of `delta` from the product and restores all product
/// invariants:
///   - the removal is widened to the uncontrollable closure of delta;
///   - states left unreachable by the removal are dropped too;
///   - every surviving estimate loses exactly the plant components of the
///     states removed from its own estimate class, so the estimate table
///     again describes the adversary's view of the *shrunken* plant;
///   - marking is carried through unchanged on survivors.
///
/// Surviving state ids are preserved. An empty delta returns m unchanged.
/// If the initial state is swept away the null product is returned. Throws
/// std::invalid_argument on unknown ids. Relabelling may leave two surviving
/// states with the same payload — the refined plant can need more states
/// than it has distinct (component, estimate) pairs — and such splits are
/// kept, distinguished only by their outgoing behaviour.
ProductAutomaton refine(const ProductAutomaton& m, const DeltaSet& delta);

}  // namespace desup
