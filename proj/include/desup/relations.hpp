// Structural orderings between automata: the subautomaton relation (exact
// state agreement along shared words) and its observer-level counterpart, the
// subobserver relation (estimate containment along shared words).

#pragma once

#include <cstddef>

#include "desup/automaton.hpp"
#include "desup/observer.hpp"

namespace desup {

/// Whether `sub` is a subautomaton of `parent`: same alphabet, states a
/// subset of parent's, same initial state, and every word in sub's language
/// leads to the *identical* state id in both automata. The null automaton is
/// a subautomaton of everything (over the same alphabet).
bool is_subautomaton(const Automaton& sub, const Automaton& parent);

/// As above but explores words of length <= depth only. Any depth of at
/// least |sub states| · |parent states| gives the exact answer.
bool is_subautomaton(const Automaton& sub, const Automaton& parent,
                     std::size_t depth);

/// Whether `sub` is a subobserver of `parent`: same alphabet, and for every
/// word in sub's language both observers are defined and sub's estimate is
/// contained in parent's. Unlike the subautomaton relation this compares the
/// label sets, not the state ids. A null observer is a subobserver of
/// everything (over the same alphabet).
bool is_subobserver(const ObserverAutomaton& sub, const ObserverAutomaton& parent);

}  // namespace desup
