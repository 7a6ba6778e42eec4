// The .desa text format: a line-oriented description of automata.
//
//   # comment (to end of line)
//   event <name> <ctrl|unctrl> <obs|unobs>
//   state <name> [marked]
//   initial <name>
//   trans <src> <event> <dst>
//
// Names of plain states and events match [A-Za-z0-9_.+-]+. Product documents
// use composite state names "q|a,b,c": the plant component and the estimate
// members joined by commas; either every state is composite or none is. A
// document with events but no states (and no initial line) denotes the null
// automaton. Serialization is canonical: events, then states, then initial,
// then transitions, each block sorted by name, so equal documents serialize
// to identical bytes.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "desup/automaton.hpp"
#include "desup/product.hpp"

namespace desup {

/// Parse failure with 1-based location. `line`/`column` are 0 when the error
/// is about the document as a whole (e.g. a missing initial state).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A plain automaton plus its state names. State ids are indices into
/// `state_names`, which is sorted; names and ids are in bijection.
struct PlantDocument {
    Automaton automaton;
    std::vector<std::string> state_names;

    const std::string& name_of(StateId q) const { return state_names.at(q); }
};

/// A product automaton plus the names of the underlying plant states.
/// Plant ids (payload components) are indices into `base_names`.
struct ProductDocument {
    ProductAutomaton product;
    std::vector<std::string> base_names;
};

using DesaDocument = std::variant<PlantDocument, ProductDocument>;

bool is_product(const DesaDocument& doc);

/// Parses a .desa document. Throws ParseError with line/column diagnostics.
DesaDocument parse_desa(std::string_view text);

/// Reads and parses a file. Throws ParseError (message includes the path)
/// or std::runtime_error when the file cannot be read.
DesaDocument parse_desa_file(const std::string& path);

std::string serialize(const PlantDocument& doc);
std::string serialize(const ProductDocument& doc);
std::string serialize(const DesaDocument& doc);

/// Wraps an automaton whose states are 0..n-1 with generated names ("s0",
/// "s1", ... zero-padded to equal width so name order equals id order).
PlantDocument plant_document(Automaton g);

/// Wraps an automaton whose states are 0..n-1 with the given display names,
/// renumbering states into sorted-name order (a PlantDocument invariant).
/// Throws std::invalid_argument on duplicate, empty or ill-formed names.
PlantDocument plant_document(Automaton g, std::vector<std::string> state_names);

/// The composite display name of a product state, e.g. "q2|q1,q2,q5".
/// Several states can share one name after refinement splits a payload; use
/// product_display_names() when names must be unique.
std::string product_state_name(const ProductDocument& doc, StateId product_id);

/// A unique display name for every product state: product_state_name() plus
/// a "~k" suffix (k = 2, 3, ... in ascending state-id order) wherever
/// several states share one payload. Exactly the names serialize() emits.
std::unordered_map<StateId, std::string> product_display_names(const ProductDocument& doc);

}  // namespace desup
