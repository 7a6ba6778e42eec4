#include "desup/product.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace desup {

namespace {

/// Union of two alphabets, matching events by name. Shared names must carry
/// identical attributes.
Alphabet merge_alphabets(const Alphabet& a, const Alphabet& b) {
    std::vector<Event> events = a.events();
    for (const Event& e : b.events()) {
        if (auto id = a.find(e.name)) {
            if (a.event(*id) != e) {
                throw std::invalid_argument(
                    "parallel_compose: event '" + e.name +
                    "' has conflicting attributes in the two alphabets");
            }
        } else {
            events.push_back(e);
        }
    }
    return Alphabet(std::move(events));
}

/// For each event of the union alphabet, its id in the side alphabet (if any).
std::vector<std::optional<EventId>> side_event_map(const Alphabet& unioned,
                                                   const Alphabet& side) {
    std::vector<std::optional<EventId>> map(unioned.size());
    for (EventId e = 0; e < unioned.size(); ++e) {
        map[e] = side.find(unioned.event(e).name);
    }
    return map;
}

std::uint64_t pair_key(StateId a, StateId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::string to_string(const ProductPayload& payload) {
    return std::to_string(payload.plant) + "|" + to_string(payload.estimate);
}

ProductAutomaton::ProductAutomaton(Automaton graph, std::vector<StateId> plant_by_id,
                                   std::vector<std::uint32_t> estimate_index_by_id,
                                   std::vector<EstimateLabel> estimates)
    : graph_(std::move(graph)),
      plant_by_id_(std::move(plant_by_id)),
      estimate_index_by_id_(std::move(estimate_index_by_id)),
      estimates_(std::move(estimates)) {
    std::unordered_set<EstimateLabel, EstimateLabelHash> label_values(estimates_.begin(),
                                                                     estimates_.end());
    if (label_values.size() != estimates_.size()) {
        throw std::invalid_argument("ProductAutomaton: estimate table has duplicate labels");
    }
    for (StateId id : graph_.states()) {
        if (id >= plant_by_id_.size() || id >= estimate_index_by_id_.size()) {
            throw std::invalid_argument("ProductAutomaton: state id without payload");
        }
        std::uint32_t est = estimate_index_by_id_[id];
        if (est >= estimates_.size()) {
            throw std::invalid_argument("ProductAutomaton: estimate index out of range");
        }
        if (!estimates_[est].contains(plant_by_id_[id])) {
            throw std::invalid_argument(
                "ProductAutomaton: state's plant component missing from its own estimate");
        }
    }
}

ProductAutomaton ProductAutomaton::null_product(Alphabet alphabet) {
    ProductAutomaton m;
    m.graph_ = Automaton::null_automaton(std::move(alphabet));
    return m;
}

void ProductAutomaton::check_state(StateId product_id) const {
    if (!graph_.has_state(product_id)) {
        throw std::invalid_argument("ProductAutomaton: unknown state " +
                                    std::to_string(product_id));
    }
}

StateId ProductAutomaton::plant_state(StateId product_id) const {
    check_state(product_id);
    return plant_by_id_[product_id];
}

std::uint32_t ProductAutomaton::estimate_index(StateId product_id) const {
    check_state(product_id);
    return estimate_index_by_id_[product_id];
}

const EstimateLabel& ProductAutomaton::estimate(StateId product_id) const {
    return estimates_[estimate_index(product_id)];
}

ProductPayload ProductAutomaton::payload(StateId product_id) const {
    return ProductPayload{plant_state(product_id), estimate(product_id)};
}

ProductAutomaton parallel_compose(const Automaton& g, const ObserverAutomaton& h) {
    Alphabet alphabet = merge_alphabets(g.alphabet(), h.graph.alphabet());
    if (g.is_null() || h.graph.is_null()) {
        return ProductAutomaton::null_product(std::move(alphabet));
    }
    auto g_event = side_event_map(alphabet, g.alphabet());
    auto h_event = side_event_map(alphabet, h.graph.alphabet());

    // Intern the observer's labels; refinement later mutates this table.
    std::vector<EstimateLabel> estimates;
    std::unordered_map<EstimateLabel, std::uint32_t, EstimateLabelHash> estimate_id;
    auto intern = [&](const EstimateLabel& label) {
        auto [it, inserted] =
            estimate_id.try_emplace(label, static_cast<std::uint32_t>(estimates.size()));
        if (inserted) {
            estimates.push_back(label);
        }
        return it->second;
    };

    std::unordered_map<std::uint64_t, StateId> id_of;
    std::vector<std::pair<StateId, StateId>> pair_of;  // by product id
    std::deque<StateId> queue;
    auto discover = [&](StateId gq, StateId hq) {
        auto [it, inserted] =
            id_of.try_emplace(pair_key(gq, hq), static_cast<StateId>(pair_of.size()));
        if (inserted) {
            pair_of.emplace_back(gq, hq);
            queue.push_back(it->second);
        }
        return it->second;
    };

    discover(g.initial(), h.graph.initial());
    std::vector<Transition> transitions;
    while (!queue.empty()) {
        StateId id = queue.front();
        queue.pop_front();
        auto [gq, hq] = pair_of[id];
        for (EventId e = 0; e < alphabet.size(); ++e) {
            StateId gt = gq;
            bool g_moves = false;
            if (g_event[e]) {
                if (auto t = g.target(gq, *g_event[e])) {
                    gt = *t;
                    g_moves = true;
                }
            }
            StateId ht = hq;
            bool h_moves = false;
            if (h_event[e]) {
                if (auto t = h.graph.target(hq, *h_event[e])) {
                    ht = *t;
                    h_moves = true;
                }
            }
            if (g_event[e] && h_event[e]) {  // shared: both must move
                if (!g_moves || !h_moves) {
                    continue;
                }
            } else if (g_event[e]) {  // private to the plant
                if (!g_moves) {
                    continue;
                }
            } else {  // private to the observer
                if (!h_moves) {
                    continue;
                }
            }
            transitions.push_back({id, e, discover(gt, ht)});
        }
    }

    std::vector<StateId> states(pair_of.size());
    std::vector<StateId> marked;
    std::vector<StateId> plant_by_id(pair_of.size());
    std::vector<std::uint32_t> est_by_id(pair_of.size());
    for (StateId id = 0; id < pair_of.size(); ++id) {
        states[id] = id;
        auto [gq, hq] = pair_of[id];
        plant_by_id[id] = gq;
        est_by_id[id] = intern(h.label_of(hq));
        if (g.is_marked(gq) && h.graph.is_marked(hq)) {
            marked.push_back(id);
        }
    }

    Automaton graph(std::move(alphabet), std::move(states), 0, std::move(marked),
                    std::move(transitions));
    return ProductAutomaton(std::move(graph), std::move(plant_by_id), std::move(est_by_id),
                            std::move(estimates));
}

Automaton parallel_compose(const Automaton& g1, const Automaton& g2) {
    Alphabet alphabet = merge_alphabets(g1.alphabet(), g2.alphabet());
    if (g1.is_null() || g2.is_null()) {
        return Automaton::null_automaton(std::move(alphabet));
    }
    auto a_event = side_event_map(alphabet, g1.alphabet());
    auto b_event = side_event_map(alphabet, g2.alphabet());

    std::unordered_map<std::uint64_t, StateId> id_of;
    std::vector<std::pair<StateId, StateId>> pair_of;
    std::deque<StateId> queue;
    auto discover = [&](StateId a, StateId b) {
        auto [it, inserted] =
            id_of.try_emplace(pair_key(a, b), static_cast<StateId>(pair_of.size()));
        if (inserted) {
            pair_of.emplace_back(a, b);
            queue.push_back(it->second);
        }
        return it->second;
    };

    discover(g1.initial(), g2.initial());
    std::vector<Transition> transitions;
    while (!queue.empty()) {
        StateId id = queue.front();
        queue.pop_front();
        auto [a, b] = pair_of[id];
        for (EventId e = 0; e < alphabet.size(); ++e) {
            StateId ta = a;
            bool a_moves = false;
            if (a_event[e]) {
                if (auto t = g1.target(a, *a_event[e])) {
                    ta = *t;
                    a_moves = true;
                }
            }
            StateId tb = b;
            bool b_moves = false;
            if (b_event[e]) {
                if (auto t = g2.target(b, *b_event[e])) {
                    tb = *t;
                    b_moves = true;
                }
            }
            if (a_event[e] && b_event[e]) {
                if (!a_moves || !b_moves) {
                    continue;
                }
            } else if (a_event[e]) {
                if (!a_moves) {
                    continue;
                }
            } else {
                if (!b_moves) {
                    continue;
                }
            }
            transitions.push_back({id, e, discover(ta, tb)});
        }
    }

    std::vector<StateId> states(pair_of.size());
    std::vector<StateId> marked;
    for (StateId id = 0; id < pair_of.size(); ++id) {
        states[id] = id;
        auto [a, b] = pair_of[id];
        if (g1.is_marked(a) && g2.is_marked(b)) {
            marked.push_back(id);
        }
    }
    return Automaton(std::move(alphabet), std::move(states), 0, std::move(marked),
                     std::move(transitions));
}

bool check_state_consistency(const ProductAutomaton& m, const Automaton& g,
                             std::size_t depth) {
    if (m.is_null()) {
        return true;
    }
    if (m.graph().alphabet() != g.alphabet() || g.is_null()) {
        return false;
    }
    const EventSet observable = g.alphabet().adversary_observable();

    // Shortest witness word to every product state.
    std::unordered_map<StateId, Word> witness;
    witness.emplace(m.graph().initial(), Word{});
    std::deque<StateId> queue{m.graph().initial()};
    while (!queue.empty()) {
        StateId id = queue.front();
        queue.pop_front();
        for (const Transition& t : m.graph().out_transitions(id)) {
            if (!witness.count(t.dst)) {
                Word w = witness[id];
                w.push_back(t.event);
                witness.emplace(t.dst, std::move(w));
                queue.push_back(t.dst);
            }
        }
    }

    // Dense indices for g's states.
    std::unordered_map<StateId, std::size_t> g_index;
    for (std::size_t i = 0; i < g.states().size(); ++i) {
        g_index.emplace(g.states()[i], i);
    }

    for (StateId id : m.graph().states()) {
        auto wit = witness.find(id);
        if (wit == witness.end() || wit->second.size() > depth) {
            return false;  // not reached within the bound
        }
        const Word& s = wit->second;
        auto plant_reached = run_word(g, s);
        if (!plant_reached || *plant_reached != m.plant_state(id)) {
            return false;  // the product tracks the plant exactly
        }
        if (!m.estimate(id).contains(*plant_reached)) {
            return false;
        }

        // All plant states reachable by words of length <= depth whose
        // adversary projection equals P(s), found by a layered breadth-first
        // search over (plant state, #projection symbols consumed). This does
        // not reuse the subset construction.
        const Word p = project(s, observable);
        const std::size_t layers = p.size() + 1;
        constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> dist(g.states().size() * layers, kUnset);
        auto at = [&](std::size_t qi, std::size_t layer) -> std::size_t& {
            return dist[qi * layers + layer];
        };
        std::deque<std::pair<std::size_t, std::size_t>> bfs;
        at(g_index.at(g.initial()), 0) = 0;
        bfs.emplace_back(g_index.at(g.initial()), 0);
        while (!bfs.empty()) {
            auto [qi, layer] = bfs.front();
            bfs.pop_front();
            std::size_t d = at(qi, layer);
            if (d == depth) {
                continue;
            }
            for (const Transition& t : g.out_transitions(g.states()[qi])) {
                std::size_t next_layer;
                if (!observable.contains(t.event)) {
                    next_layer = layer;
                } else if (layer < p.size() && t.event == p[layer]) {
                    next_layer = layer + 1;
                } else {
                    continue;
                }
                std::size_t ti = g_index.at(t.dst);
                if (at(ti, next_layer) == kUnset) {
                    at(ti, next_layer) = d + 1;
                    bfs.emplace_back(ti, next_layer);
                }
            }
        }
        for (std::size_t qi = 0; qi < g.states().size(); ++qi) {
            if (at(qi, p.size()) != kUnset && !m.estimate(id).contains(g.states()[qi])) {
                return false;  // a projection-equivalent word escapes the estimate
            }
        }
    }
    return true;
}

bool check_spa(const Automaton& g, const ProductAutomaton& m) {
    if (m.is_null()) {
        return true;
    }
    if (m.graph().alphabet() != g.alphabet()) {
        return false;
    }
    // Determinize the product itself; its estimates must tile the product's
    // state set without overlap.
    ObserverAutomaton t = observe(m.graph());
    std::size_t total = 0;
    std::set<StateId> covered;
    for (const EstimateLabel& label : t.labels) {
        total += label.size();
        covered.insert(label.members().begin(), label.members().end());
    }
    if (total != covered.size()) {
        return false;  // overlap
    }
    return covered == std::set<StateId>(m.graph().states().begin(),
                                        m.graph().states().end());
}

CanonicalProduct canonical_form(const ProductAutomaton& m) {
    CanonicalProduct canon;
    if (m.is_null()) {
        canon.lines.push_back("(null)");
        return canon;
    }
    const Automaton& graph = m.graph();

    // Renumber states breadth-first, walking each state's out-edges in
    // event-name order so the numbering depends only on the graph's shape.
    std::vector<EventId> by_name(graph.alphabet().size());
    for (EventId e = 0; e < by_name.size(); ++e) {
        by_name[e] = e;
    }
    std::sort(by_name.begin(), by_name.end(), [&](EventId l, EventId r) {
        return graph.alphabet().event(l).name < graph.alphabet().event(r).name;
    });

    std::map<StateId, std::size_t> order;
    std::vector<StateId> bfs{graph.initial()};
    order.emplace(graph.initial(), 0);
    for (std::size_t head = 0; head < bfs.size(); ++head) {
        StateId q = bfs[head];
        for (EventId e : by_name) {
            if (auto dst = graph.target(q, e)) {
                if (order.emplace(*dst, bfs.size()).second) {
                    bfs.push_back(*dst);
                }
            }
        }
    }
    // Products are accessible by construction; tolerate stragglers anyway by
    // appending them in payload order so the form stays deterministic.
    std::vector<StateId> stragglers;
    for (StateId q : graph.states()) {
        if (!order.count(q)) {
            stragglers.push_back(q);
        }
    }
    std::sort(stragglers.begin(), stragglers.end(), [&](StateId l, StateId r) {
        return to_string(m.payload(l)) < to_string(m.payload(r));
    });
    for (StateId q : stragglers) {
        order.emplace(q, bfs.size());
        bfs.push_back(q);
    }

    for (std::size_t i = 0; i < bfs.size(); ++i) {
        std::string line = "state " + std::to_string(i) + " " + to_string(m.payload(bfs[i]));
        if (graph.is_marked(bfs[i])) {
            line += " marked";
        }
        canon.lines.push_back(std::move(line));
    }
    for (StateId q : bfs) {
        for (EventId e : by_name) {
            if (auto dst = graph.target(q, e)) {
                canon.lines.push_back("trans " + std::to_string(order.at(q)) + " " +
                                      graph.alphabet().event(e).name + " " +
                                      std::to_string(order.at(*dst)));
            }
        }
    }
    return canon;
}

bool canonically_equal(const ProductAutomaton& a, const ProductAutomaton& b) {
    return canonical_form(a) == canonical_form(b);
}

std::string canonical_diff(const ProductAutomaton& a, const ProductAutomaton& b) {
    CanonicalProduct ca = canonical_form(a);
    CanonicalProduct cb = canonical_form(b);
    if (ca == cb) {
        return "";
    }
    std::vector<std::string> sa = ca.lines;
    std::vector<std::string> sb = cb.lines;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::vector<std::string> only_a;
    std::vector<std::string> only_b;
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(only_a));
    std::set_difference(sb.begin(), sb.end(), sa.begin(), sa.end(),
                        std::back_inserter(only_b));

    std::ostringstream out;
    int reported = 0;
    constexpr int kLimit = 8;
    auto report = [&](const std::string& side, const std::string& line) {
        if (reported < kLimit) {
            out << side << line << "\n";
        }
        ++reported;
    };
    for (const std::string& line : only_a) {
        report("only in left:  ", line);
    }
    for (const std::string& line : only_b) {
        report("only in right: ", line);
    }
    if (only_a.empty() && only_b.empty()) {
        out << "same lines, different order (states are numbered differently)\n";
    }
    if (reported > kLimit) {
        out << "... and " << (reported - kLimit) << " more difference(s)\n";
    }
    return out.str();
}

}  // namespace desup
