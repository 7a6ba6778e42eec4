#include "desup/desa.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace desup {

namespace {

struct Token {
    std::string text;
    int line;
    int column;
};

bool plain_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '+' || c == '-';
}

bool valid_plain_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), plain_name_char);
}

[[noreturn]] void fail(const std::string& message, const Token& at) {
    throw ParseError(message, at.line, at.column);
}

[[noreturn]] void fail(const std::string& message) { throw ParseError(message, 0, 0); }

std::vector<std::vector<Token>> tokenize(std::string_view text) {
    std::vector<std::vector<Token>> lines;
    int line_no = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::vector<Token> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            if (line[i] == ' ' || line[i] == '\t') {
                ++i;
                continue;
            }
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
                ++i;
            }
            tokens.push_back(Token{std::string(line.substr(start, i - start)), line_no,
                                   static_cast<int>(start) + 1});
        }
        if (!tokens.empty()) {
            lines.push_back(std::move(tokens));
        }
        if (eol == std::string_view::npos) {
            break;
        }
        pos = eol + 1;
        ++line_no;
    }
    return lines;
}

struct StateRecord {
    Token name;
    bool marked = false;
};

struct TransRecord {
    Token src;
    Token event;
    Token dst;
};

struct CompositeName {
    std::string plant;
    std::vector<std::string> members;
};

CompositeName split_composite(const Token& tok) {
    // An optional trailing "~<digits>" distinguishes states that share a
    // payload (refinement can split one payload across several states).
    std::string text = tok.text;
    if (std::size_t tilde = text.find('~'); tilde != std::string::npos) {
        std::string suffix = text.substr(tilde + 1);
        bool digits = !suffix.empty() &&
                      std::all_of(suffix.begin(), suffix.end(), [](char c) {
                          return std::isdigit(static_cast<unsigned char>(c));
                      });
        if (!digits || text.find('~', tilde + 1) != std::string::npos) {
            fail("state name suffix after '~' must be a number", tok);
        }
        text.resize(tilde);
    }
    std::size_t bar = text.find('|');
    if (bar == std::string::npos || text.find('|', bar + 1) != std::string::npos) {
        fail("product state name must contain exactly one '|'", tok);
    }
    CompositeName out;
    out.plant = text.substr(0, bar);
    if (!valid_plain_name(out.plant)) {
        fail("bad plant component in product state name", tok);
    }
    std::string rest = text.substr(bar + 1);
    std::size_t start = 0;
    while (true) {
        std::size_t comma = rest.find(',', start);
        std::string member = rest.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!valid_plain_name(member)) {
            fail("bad estimate member in product state name", tok);
        }
        out.members.push_back(std::move(member));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    for (std::size_t i = 1; i < out.members.size(); ++i) {
        if (out.members[i] <= out.members[i - 1]) {
            fail("estimate members must be distinct and in ascending name order", tok);
        }
    }
    return out;
}

}  // namespace

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      line_(line),
      column_(column) {}

bool is_product(const DesaDocument& doc) {
    return std::holds_alternative<ProductDocument>(doc);
}

DesaDocument parse_desa(std::string_view text) {
    std::vector<std::pair<Token, Event>> events;
    std::vector<StateRecord> states;
    std::vector<Token> initials;
    std::vector<TransRecord> transitions;

    for (const auto& tokens : tokenize(text)) {
        const Token& head = tokens[0];
        if (head.text == "event") {
            if (tokens.size() != 4) {
                fail("expected: event <name> <ctrl|unctrl> <obs|unobs>", head);
            }
            if (!valid_plain_name(tokens[1].text)) {
                fail("bad event name", tokens[1]);
            }
            Event e;
            e.name = tokens[1].text;
            if (tokens[2].text == "ctrl") {
                e.controllable = true;
            } else if (tokens[2].text == "unctrl") {
                e.controllable = false;
            } else {
                fail("expected 'ctrl' or 'unctrl'", tokens[2]);
            }
            if (tokens[3].text == "obs") {
                e.adversary_observable = true;
            } else if (tokens[3].text == "unobs") {
                e.adversary_observable = false;
            } else {
                fail("expected 'obs' or 'unobs'", tokens[3]);
            }
            events.emplace_back(tokens[1], std::move(e));
        } else if (head.text == "state") {
            if (tokens.size() != 2 && tokens.size() != 3) {
                fail("expected: state <name> [marked]", head);
            }
            if (tokens.size() == 3 && tokens[2].text != "marked") {
                fail("expected 'marked'", tokens[2]);
            }
            states.push_back(StateRecord{tokens[1], tokens.size() == 3});
        } else if (head.text == "initial") {
            if (tokens.size() != 2) {
                fail("expected: initial <name>", head);
            }
            if (!initials.empty()) {
                fail("duplicate initial declaration", head);
            }
            initials.push_back(tokens[1]);
        } else if (head.text == "trans") {
            if (tokens.size() != 4) {
                fail("expected: trans <src> <event> <dst>", head);
            }
            transitions.push_back(TransRecord{tokens[1], tokens[2], tokens[3]});
        } else {
            fail("unknown directive '" + head.text + "'", head);
        }
    }

    std::vector<Event> alphabet_events;
    for (const auto& [tok, event] : events) {
        for (const Event& existing : alphabet_events) {
            if (existing.name == event.name) {
                fail("duplicate event '" + event.name + "'", tok);
            }
        }
        alphabet_events.push_back(event);
    }
    Alphabet alphabet(std::move(alphabet_events));

    bool product_mode = false;
    for (const StateRecord& s : states) {
        if (s.name.text.find('|') != std::string::npos) {
            product_mode = true;
            break;
        }
    }

    // Resolve full state names (composite for products) to dense ids in
    // sorted-name order.
    std::map<std::string, StateId> state_id;
    for (const StateRecord& s : states) {
        bool composite = s.name.text.find('|') != std::string::npos;
        if (product_mode != composite) {
            fail("cannot mix product and plain state names", s.name);
        }
        if (!product_mode && !valid_plain_name(s.name.text)) {
            fail("bad state name", s.name);
        }
        if (product_mode) {
            split_composite(s.name);  // validates
        }
        if (!state_id.emplace(s.name.text, 0).second) {
            fail("duplicate state '" + s.name.text + "'", s.name);
        }
    }
    {
        StateId next = 0;
        for (auto& [name, id] : state_id) {
            id = next++;
        }
    }

    if (initials.empty() && !states.empty()) {
        fail("missing initial declaration");
    }
    if (states.empty()) {
        if (!initials.empty()) {
            fail("initial state '" + initials[0].text + "' is not declared",
                 initials[0]);
        }
        if (!transitions.empty()) {
            fail("transition references undeclared state", transitions[0].src);
        }
        // Events only: the null automaton.
        return PlantDocument{Automaton::null_automaton(std::move(alphabet)), {}};
    }

    auto resolve_state = [&](const Token& tok) {
        auto it = state_id.find(tok.text);
        if (it == state_id.end()) {
            fail("unknown state '" + tok.text + "'", tok);
        }
        return it->second;
    };
    auto resolve_event = [&](const Token& tok) {
        auto id = alphabet.find(tok.text);
        if (!id) {
            fail("unknown event '" + tok.text + "'", tok);
        }
        return *id;
    };

    StateId initial = resolve_state(initials[0]);
    std::vector<StateId> ids(state_id.size());
    std::vector<StateId> marked;
    for (const StateRecord& s : states) {
        if (s.marked) {
            marked.push_back(state_id.at(s.name.text));
        }
    }
    for (StateId i = 0; i < ids.size(); ++i) {
        ids[i] = i;
    }

    std::vector<Transition> trans;
    std::map<std::pair<StateId, EventId>, const TransRecord*> seen_trans;
    for (const TransRecord& t : transitions) {
        StateId src = resolve_state(t.src);
        EventId event = resolve_event(t.event);
        StateId dst = resolve_state(t.dst);
        auto [it, inserted] = seen_trans.emplace(std::make_pair(src, event), &t);
        if (!inserted) {
            fail("conflicting transition: state '" + t.src.text + "' already moves on '" +
                     t.event.text + "'",
                 t.src);
        }
        trans.push_back({src, event, dst});
    }

    if (!product_mode) {
        std::vector<std::string> names;
        for (const auto& [name, id] : state_id) {
            names.push_back(name);
        }
        Automaton g(std::move(alphabet), std::move(ids), initial, std::move(marked),
                    std::move(trans));
        return PlantDocument{std::move(g), std::move(names)};
    }

    // Product document: build the base-state universe from every name that
    // appears as a plant component or estimate member.
    std::map<std::string, StateId> base_id;
    std::vector<std::pair<StateId, CompositeName>> composites;  // (product id, parts)
    for (const StateRecord& s : states) {
        composites.emplace_back(state_id.at(s.name.text), split_composite(s.name));
    }
    for (const auto& [id, parts] : composites) {
        base_id.emplace(parts.plant, 0);
        for (const std::string& member : parts.members) {
            base_id.emplace(member, 0);
        }
    }
    {
        StateId next = 0;
        for (auto& [name, id] : base_id) {
            id = next++;
        }
    }
    std::vector<std::string> base_names;
    for (const auto& [name, id] : base_id) {
        base_names.push_back(name);
    }

    std::vector<StateId> plant_by_id(state_id.size(), 0);
    std::vector<std::uint32_t> est_by_id(state_id.size(), 0);
    std::vector<EstimateLabel> estimates;
    std::unordered_map<EstimateLabel, std::uint32_t, EstimateLabelHash> index_of;
    for (const auto& [id, parts] : composites) {
        plant_by_id[id] = base_id.at(parts.plant);
        std::vector<StateId> members;
        for (const std::string& member : parts.members) {
            members.push_back(base_id.at(member));
        }
        EstimateLabel label{std::move(members)};
        auto [it, inserted] =
            index_of.try_emplace(label, static_cast<std::uint32_t>(estimates.size()));
        if (inserted) {
            estimates.push_back(std::move(label));
        }
        est_by_id[id] = it->second;
    }

    try {
        Automaton graph(std::move(alphabet), std::move(ids), initial, std::move(marked),
                        std::move(trans));
        ProductAutomaton product(std::move(graph), std::move(plant_by_id),
                                 std::move(est_by_id), std::move(estimates));
        return ProductDocument{std::move(product), std::move(base_names)};
    } catch (const std::invalid_argument& e) {
        fail(std::string("invalid product document: ") + e.what());
    }
}

DesaDocument parse_desa_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_desa(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), 0, 0);
    }
}

namespace {

void serialize_events(const Alphabet& alphabet, std::ostream& out) {
    for (const Event& e : alphabet.events()) {
        out << "event " << e.name << ' ' << (e.controllable ? "ctrl" : "unctrl") << ' '
            << (e.adversary_observable ? "obs" : "unobs") << '\n';
    }
}

/// Emits states/initial/trans given a resolved display name per state id.
void serialize_body(const Automaton& g,
                    const std::unordered_map<StateId, std::string>& name_of,
                    std::ostream& out) {
    std::vector<std::pair<std::string, StateId>> by_name;
    for (StateId q : g.states()) {
        by_name.emplace_back(name_of.at(q), q);
    }
    std::sort(by_name.begin(), by_name.end());
    for (const auto& [name, q] : by_name) {
        out << "state " << name;
        if (g.is_marked(q)) {
            out << " marked";
        }
        out << '\n';
    }
    if (g.is_null()) {
        return;
    }
    out << "initial " << name_of.at(g.initial()) << '\n';
    std::vector<std::tuple<std::string, std::string, std::string>> lines;
    for (const Transition& t : g.transitions()) {
        lines.emplace_back(name_of.at(t.src), g.alphabet().event(t.event).name,
                           name_of.at(t.dst));
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& [src, event, dst] : lines) {
        out << "trans " << src << ' ' << event << ' ' << dst << '\n';
    }
}

}  // namespace

std::string serialize(const PlantDocument& doc) {
    const Automaton& g = doc.automaton;
    if (!g.is_null() &&
        (g.states().size() != doc.state_names.size() || g.states().back() + 1 != g.states().size())) {
        throw std::invalid_argument("serialize: plant state ids must be dense 0..n-1");
    }
    if (!std::is_sorted(doc.state_names.begin(), doc.state_names.end()) ||
        std::adjacent_find(doc.state_names.begin(), doc.state_names.end()) !=
            doc.state_names.end()) {
        throw std::invalid_argument("serialize: state names must be sorted and unique");
    }
    std::unordered_map<StateId, std::string> name_of;
    for (StateId q = 0; q < doc.state_names.size(); ++q) {
        if (!valid_plain_name(doc.state_names[q])) {
            throw std::invalid_argument("serialize: bad state name '" +
                                        doc.state_names[q] + "'");
        }
        name_of.emplace(q, doc.state_names[q]);
    }
    std::ostringstream out;
    serialize_events(g.alphabet(), out);
    serialize_body(g, name_of, out);
    return out.str();
}

std::string product_state_name(const ProductDocument& doc, StateId product_id) {
    const ProductAutomaton& m = doc.product;
    std::string name = doc.base_names.at(m.plant_state(product_id));
    name += '|';
    const auto& members = m.estimate(product_id).members();
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i > 0) {
            name += ',';
        }
        name += doc.base_names.at(members[i]);
    }
    return name;
}

std::string serialize(const ProductDocument& doc) {
    if (!std::is_sorted(doc.base_names.begin(), doc.base_names.end()) ||
        std::adjacent_find(doc.base_names.begin(), doc.base_names.end()) !=
            doc.base_names.end()) {
        throw std::invalid_argument("serialize: base names must be sorted and unique");
    }
    for (const std::string& name : doc.base_names) {
        if (!valid_plain_name(name)) {
            throw std::invalid_argument("serialize: bad base state name '" + name + "'");
        }
    }
    const Automaton& g = doc.product.graph();
    std::ostringstream out;
    serialize_events(g.alphabet(), out);
    serialize_body(g, product_display_names(doc), out);
    return out.str();
}

std::unordered_map<StateId, std::string> product_display_names(const ProductDocument& doc) {
    // States sharing a payload (post-refinement splits) get "~2", "~3", ...
    // suffixes in ascending state-id order; the first keeps the plain name.
    std::unordered_map<StateId, std::string> name_of;
    std::unordered_map<std::string, int> uses;
    for (StateId q : doc.product.graph().states()) {
        std::string name = product_state_name(doc, q);
        int n = ++uses[name];
        if (n > 1) {
            name += '~' + std::to_string(n);
        }
        name_of.emplace(q, std::move(name));
    }
    return name_of;
}

std::string serialize(const DesaDocument& doc) {
    if (const auto* plant = std::get_if<PlantDocument>(&doc)) {
        return serialize(*plant);
    }
    return serialize(std::get<ProductDocument>(doc));
}

PlantDocument plant_document(Automaton g) {
    if (g.is_null()) {
        return PlantDocument{std::move(g), {}};
    }
    if (g.states().back() + 1 != g.states().size()) {
        throw std::invalid_argument("plant_document: state ids must be dense 0..n-1");
    }
    std::size_t width = std::to_string(g.states().size() - 1).size();
    std::vector<std::string> names;
    for (StateId q = 0; q < g.states().size(); ++q) {
        std::string digits = std::to_string(q);
        names.push_back("s" + std::string(width - digits.size(), '0') + digits);
    }
    return PlantDocument{std::move(g), std::move(names)};
}

PlantDocument plant_document(Automaton g, std::vector<std::string> state_names) {
    if (g.is_null()) {
        if (!state_names.empty()) {
            throw std::invalid_argument("plant_document: names given for null automaton");
        }
        return PlantDocument{std::move(g), {}};
    }
    if (g.states().back() + 1 != g.states().size() ||
        state_names.size() != g.states().size()) {
        throw std::invalid_argument(
            "plant_document: need dense ids and one name per state");
    }
    for (const std::string& name : state_names) {
        if (!valid_plain_name(name)) {
            throw std::invalid_argument("plant_document: bad state name '" + name + "'");
        }
    }
    // Rank states by name; ids follow sorted-name order afterwards.
    std::vector<StateId> order(state_names.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
        return state_names[a] < state_names[b];
    });
    std::vector<StateId> rank(order.size());
    for (StateId pos = 0; pos < order.size(); ++pos) {
        rank[order[pos]] = pos;
    }
    std::vector<std::string> sorted_names(order.size());
    for (StateId pos = 0; pos < order.size(); ++pos) {
        sorted_names[pos] = state_names[order[pos]];
    }
    if (std::adjacent_find(sorted_names.begin(), sorted_names.end()) !=
        sorted_names.end()) {
        throw std::invalid_argument("plant_document: duplicate state name");
    }
    std::vector<StateId> states(order.size());
    std::iota(states.begin(), states.end(), 0);
    std::vector<StateId> marked;
    for (StateId q : g.marked()) {
        marked.push_back(rank[q]);
    }
    std::vector<Transition> transitions;
    for (const Transition& t : g.transitions()) {
        transitions.push_back({rank[t.src], t.event, rank[t.dst]});
    }
    Automaton renamed(g.alphabet(), std::move(states), rank[g.initial()],
                      std::move(marked), std::move(transitions));
    return PlantDocument{std::move(renamed), std::move(sorted_names)};
}

}  // namespace desup
