#include "desup/oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "desup/observer.hpp"
#include "desup/relations.hpp"
#include "desup/synthesis.hpp"

namespace desup {

namespace {

/// rng() in [lo, hi], determined purely by the engine's documented output
/// sequence (std::uniform_int_distribution is not portable bit-for-bit).
std::uint64_t pick(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng() % (hi - lo + 1);
}

bool chance(std::mt19937_64& rng, double p) {
    // 53 uniform bits, same construction on every platform.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

/// Number of generated words of length <= depth, saturated at cap + 1. The
/// graph is deterministic, so counting paths from the initial state counts
/// words exactly.
std::uint64_t bounded_word_count(const Automaton& a, std::size_t depth,
                                 std::uint64_t cap) {
    if (a.is_null()) {
        return 0;
    }
    std::unordered_map<StateId, std::size_t> index;
    for (StateId q : a.states()) {
        index.emplace(q, index.size());
    }
    const std::uint64_t sat = cap + 1;
    std::vector<std::uint64_t> layer(index.size(), 0);
    layer[index.at(a.initial())] = 1;
    std::uint64_t total = 1;  // the empty word
    std::vector<std::uint64_t> next;
    for (std::size_t d = 0; d < depth && total <= cap; ++d) {
        next.assign(index.size(), 0);
        bool live = false;
        for (const Transition& t : a.transitions()) {
            std::uint64_t incoming = layer[index.at(t.src)];
            if (incoming == 0) {
                continue;
            }
            std::uint64_t& slot = next[index.at(t.dst)];
            slot = std::min(sat, slot + incoming);
            live = true;
        }
        if (!live) {
            break;
        }
        for (std::uint64_t c : next) {
            total = std::min(sat, total + c);
        }
        layer.swap(next);
    }
    return total;
}

/// Largest language any brute-force candidate may materialize. Beyond this
/// the exhaustive search would dominate memory, so the instance is rejected.
constexpr std::uint64_t kBruteWordCap = 20000;

/// Renumbers states to 0..n-1 preserving order.
Automaton relabel_dense(const Automaton& g) {
    if (g.is_null()) {
        return g;
    }
    std::unordered_map<StateId, StateId> dense;
    for (StateId q : g.states()) {
        dense.emplace(q, static_cast<StateId>(dense.size()));
    }
    std::vector<StateId> states;
    for (StateId q = 0; q < dense.size(); ++q) {
        states.push_back(q);
    }
    std::vector<StateId> marked;
    for (StateId q : g.marked()) {
        marked.push_back(dense.at(q));
    }
    std::vector<Transition> transitions;
    for (const Transition& t : g.transitions()) {
        transitions.push_back({dense.at(t.src), t.event, dense.at(t.dst)});
    }
    return Automaton(g.alphabet(), std::move(states), dense.at(g.initial()),
                     std::move(marked), std::move(transitions));
}

bool shortlex_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a < b;
}

}  // namespace

ProductAutomaton naive_refine(const ProductAutomaton& m, const DeltaSet& delta) {
    for (StateId q : delta) {
        if (!m.graph().has_state(q)) {
            throw std::invalid_argument("naive_refine: unknown product state " +
                                        std::to_string(q));
        }
    }
    if (delta.empty()) {
        return m;
    }
    const Automaton& graph = m.graph();
    const EventSet controllable = graph.alphabet().controllable();

    // Uncontrollable backward closure by whole-edge-set fixpoint scans —
    // deliberately not sharing code with refine().
    std::set<StateId> removed(delta.begin(), delta.end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Transition& t : graph.transitions()) {
            if (!controllable.contains(t.event) && removed.count(t.dst) &&
                !removed.count(t.src)) {
                removed.insert(t.src);
                changed = true;
            }
        }
    }
    if (removed.count(graph.initial())) {
        return ProductAutomaton::null_product(graph.alphabet());
    }

    // The surviving product states, viewed as a plant in their own right.
    std::vector<StateId> kept;
    for (StateId q : graph.states()) {
        if (!removed.count(q)) {
            kept.push_back(q);
        }
    }
    std::vector<Transition> kept_transitions;
    for (const Transition& t : graph.transitions()) {
        if (!removed.count(t.src) && !removed.count(t.dst)) {
            kept_transitions.push_back(t);
        }
    }
    Automaton shrunk = accessible(Automaton(graph.alphabet(), std::move(kept),
                                            graph.initial(), {},
                                            std::move(kept_transitions)));

    // Re-observe and recompose from scratch, then translate the payloads
    // (which live over product ids) back into plant space.
    ProductAutomaton recomposed = parallel_compose(shrunk, observe(shrunk));
    const Automaton& rgraph = recomposed.graph();
    std::size_t size = rgraph.states().empty() ? 0 : rgraph.states().back() + 1;
    std::vector<StateId> plant_by_id(size, 0);
    std::vector<std::uint32_t> est_by_id(size, 0);
    std::vector<EstimateLabel> estimates;
    std::unordered_map<EstimateLabel, std::uint32_t, EstimateLabelHash> index_of;
    std::vector<StateId> marked;
    for (StateId q : rgraph.states()) {
        StateId original = recomposed.plant_state(q);  // a product id of m
        std::vector<StateId> members;
        for (StateId member : recomposed.estimate(q).members()) {
            members.push_back(m.plant_state(member));
        }
        EstimateLabel label{std::move(members)};
        auto [it, inserted] =
            index_of.try_emplace(label, static_cast<std::uint32_t>(estimates.size()));
        if (inserted) {
            estimates.push_back(std::move(label));
        }
        plant_by_id[q] = m.plant_state(original);
        est_by_id[q] = it->second;
        if (graph.is_marked(original)) {
            marked.push_back(q);  // marking carried from the input product
        }
    }
    Automaton final_graph(rgraph.alphabet(), rgraph.states(), rgraph.initial(),
                          std::move(marked), rgraph.transitions());
    return ProductAutomaton(std::move(final_graph), std::move(plant_by_id),
                            std::move(est_by_id), std::move(estimates));
}

Automaton random_automaton(const RandomConfig& cfg) {
    if (cfg.min_states < 1 || cfg.min_states > cfg.max_states ||
        cfg.min_events < 1 || cfg.min_events > cfg.max_events || cfg.max_events > 26) {
        throw std::invalid_argument("random_automaton: bad state/event bounds");
    }
    std::mt19937_64 rng(cfg.seed);
    std::size_t n = pick(rng, cfg.min_states, cfg.max_states);
    std::size_t k = pick(rng, cfg.min_events, cfg.max_events);

    std::vector<Event> events;
    for (std::size_t e = 0; e < k; ++e) {
        events.push_back(Event{std::string(1, static_cast<char>('a' + e)),
                               chance(rng, cfg.p_controllable),
                               chance(rng, cfg.p_observable)});
    }
    // Draw order (states then events then per-(q,e) transitions then marks)
    // is part of the generator's contract: same seed, same automaton.
    std::vector<Transition> transitions;
    for (StateId q = 0; q < n; ++q) {
        for (EventId e = 0; e < k; ++e) {
            if (chance(rng, cfg.density)) {
                transitions.push_back(
                    {q, e, static_cast<StateId>(pick(rng, 0, n - 1))});
            }
        }
    }
    std::vector<StateId> marked;
    for (StateId q = 0; q < n; ++q) {
        if (chance(rng, cfg.p_marked)) {
            marked.push_back(q);
        }
    }
    std::vector<StateId> states(n);
    for (StateId q = 0; q < n; ++q) {
        states[q] = q;
    }
    Automaton g(Alphabet(std::move(events)), std::move(states), 0, std::move(marked),
                std::move(transitions));
    return relabel_dense(accessible(g));
}

Automaton random_subautomaton(const Automaton& g, std::uint64_t seed) {
    if (g.is_null()) {
        return g;
    }
    std::mt19937_64 rng(seed);
    std::unordered_set<StateId> dropped;
    for (StateId q : g.states()) {
        if (q != g.initial() && chance(rng, 0.3)) {
            dropped.insert(q);
        }
    }
    std::vector<StateId> states;
    std::vector<StateId> marked;
    for (StateId q : g.states()) {
        if (!dropped.count(q)) {
            states.push_back(q);
            if (g.is_marked(q)) {
                marked.push_back(q);
            }
        }
    }
    std::vector<Transition> transitions;
    for (const Transition& t : g.transitions()) {
        if (!dropped.count(t.src) && !dropped.count(t.dst) && !chance(rng, 0.2)) {
            transitions.push_back(t);
        }
    }
    return accessible(Automaton(g.alphabet(), std::move(states), g.initial(),
                                std::move(marked), std::move(transitions)));
}

DeltaSet random_refinable_delta(const ProductAutomaton& m, std::uint64_t seed) {
    if (m.is_null()) {
        return {};
    }
    const Automaton& graph = m.graph();
    std::mt19937_64 rng(seed);

    // Sparse seed picks, biased away from the initial state so the closure
    // below does not swallow the whole graph every time.
    std::set<StateId> removed;
    for (StateId q : graph.states()) {
        if (q != graph.initial() && chance(rng, 0.15)) {
            removed.insert(q);
        }
    }
    if (removed.empty() && graph.state_count() > 1) {
        const std::vector<StateId>& states = graph.states();
        StateId q = states[rng() % states.size()];
        if (q != graph.initial()) {
            removed.insert(q);
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (const Transition& t : graph.transitions()) {
            bool src_in = removed.count(t.src) != 0;
            bool dst_in = removed.count(t.dst) != 0;
            if (src_in && !dst_in) {
                removed.insert(t.dst);
                changed = true;
            } else if (dst_in && !src_in &&
                       !graph.alphabet().event(t.event).controllable) {
                removed.insert(t.src);
                changed = true;
            }
        }
    }
    return DeltaSet(removed.begin(), removed.end());
}

BruteForceResult brute_force_supervisors(const Automaton& g,
                                         std::size_t max_controllable_edges) {
    BruteForceResult result;
    ProductAutomaton m = parallel_compose(g, observe(g));
    if (m.is_null()) {
        return result;
    }
    const Automaton& graph = m.graph();
    const EventSet controllable = graph.alphabet().controllable();
    std::vector<std::size_t> ctrl_edges;
    std::vector<Transition> unctrl;
    for (std::size_t i = 0; i < graph.transitions().size(); ++i) {
        if (controllable.contains(graph.transitions()[i].event)) {
            ctrl_edges.push_back(i);
        } else {
            unctrl.push_back(graph.transitions()[i]);
        }
    }
    if (ctrl_edges.size() > max_controllable_edges) {
        throw std::invalid_argument("brute_force_supervisors: too many controllable "
                                    "transitions (" + std::to_string(ctrl_edges.size()) +
                                    ")");
    }
    const std::size_t depth = 2 * graph.state_count();
    // Every candidate's language is a subset of the full product's language
    // at the same depth, so one saturating path count bounds them all.
    if (bounded_word_count(graph, depth, kBruteWordCap) > kBruteWordCap) {
        throw std::invalid_argument(
            "brute_force_supervisors: bounded language exceeds " +
            std::to_string(kBruteWordCap) + " words");
    }

    std::vector<std::vector<Word>> opaque_languages;
    for (std::uint64_t mask = 0; mask < (1ull << ctrl_edges.size()); ++mask) {
        ++result.candidates;
        std::vector<Transition> enabled = unctrl;
        for (std::size_t b = 0; b < ctrl_edges.size(); ++b) {
            if (mask & (1ull << b)) {
                enabled.push_back(graph.transitions()[ctrl_edges[b]]);
            }
        }
        Automaton candidate = accessible(Automaton(graph.alphabet(), graph.states(),
                                                   graph.initial(), {},
                                                   std::move(enabled)));
        // Closed loop = the candidate with marking pulled back from the plant.
        std::vector<StateId> marked;
        for (StateId q : candidate.states()) {
            if (g.is_marked(m.plant_state(q))) {
                marked.push_back(q);
            }
        }
        Automaton loop(candidate.alphabet(), candidate.states(), candidate.initial(),
                       std::move(marked), candidate.transitions());
        if (verify_current_state_opacity(loop)) {
            opaque_languages.push_back(bounded_language(loop, depth));
        }
    }

    std::sort(opaque_languages.begin(), opaque_languages.end());
    opaque_languages.erase(std::unique(opaque_languages.begin(), opaque_languages.end()),
                           opaque_languages.end());
    for (const auto& lang : opaque_languages) {
        bool dominated = false;
        for (const auto& other : opaque_languages) {
            if (&lang != &other && lang != other &&
                std::includes(other.begin(), other.end(), lang.begin(), lang.end(),
                              shortlex_less)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            result.maximal_languages.push_back(lang);
        }
    }
    return result;
}

RelationReport relation_check(const Automaton& g, const Automaton& g_sub,
                              std::size_t depth) {
    RelationReport report;
    ObserverAutomaton h = observe(g);
    ProductAutomaton m = parallel_compose(g, h);
    if (m.is_null()) {
        report.match_equals_product_eq = true;
        report.match_refines_rho = true;
        return report;
    }

    // Map plant event ids onto the observer's restricted alphabet.
    const EventSet observable = g.alphabet().adversary_observable();
    std::vector<std::optional<EventId>> h_event(g.alphabet().size());
    for (EventId e = 0; e < g.alphabet().size(); ++e) {
        if (observable.contains(e)) {
            h_event[e] = h.graph.alphabet().find(g.alphabet().event(e).name);
        }
    }

    // A word's "match" cell is the pair (plant landing state, observer
    // landing state of its projection); its product cell is the product
    // landing state. The relations coincide on every word <= depth iff a
    // lockstep walk of M against (G, H) never desynchronizes and no two
    // product states carry the same (plant, estimate) payload. Walking
    // states instead of enumerating words covers the same bounded set.
    report.match_equals_product_eq = true;
    {
        std::set<ProductPayload> payloads;
        for (StateId s : m.graph().states()) {
            if (!payloads.insert(m.payload(s)).second) {
                report.match_equals_product_eq = false;  // two cells, one label
            }
        }
        struct Triple {
            StateId product, plant, observer;
        };
        std::set<std::tuple<StateId, StateId, StateId>> seen;
        std::deque<std::pair<Triple, std::size_t>> queue;
        Triple start{m.graph().initial(), g.initial(), h.graph.initial()};
        queue.push_back({start, 0});
        seen.insert({start.product, start.plant, start.observer});
        while (!queue.empty() && report.match_equals_product_eq) {
            auto [triple, dist] = queue.front();
            queue.pop_front();
            if (dist == depth) {
                continue;
            }
            for (EventId e = 0; e < g.alphabet().size(); ++e) {
                auto m_next = m.graph().target(triple.product, e);
                auto g_next = g.target(triple.plant, e);
                std::optional<StateId> h_next;
                bool h_moves = observable.contains(e);
                if (h_moves && g_next && h_event[e]) {
                    h_next = h.graph.target(triple.observer, *h_event[e]);
                }
                bool pair_defined = g_next && (!h_moves || h_next.has_value());
                if (m_next.has_value() != pair_defined) {
                    report.match_equals_product_eq = false;
                    break;
                }
                if (!m_next) {
                    continue;
                }
                StateId obs = h_moves ? *h_next : triple.observer;
                if (m.plant_state(*m_next) != *g_next ||
                    !(m.estimate(*m_next) == h.label_of(obs))) {
                    report.match_equals_product_eq = false;
                    break;
                }
                Triple next{*m_next, *g_next, obs};
                if (seen.insert({next.product, next.plant, next.observer}).second) {
                    queue.push_back({next, dist + 1});
                }
            }
        }
    }

    // match <= rho: no product state may be reached both by a word of
    // L(g_sub) and by a word of L(g) \ L(g_sub). Walk M in lockstep with
    // g_sub, letting the g_sub side die without stopping the walk.
    report.match_refines_rho = true;
    {
        constexpr StateId kDead = std::numeric_limits<StateId>::max();
        std::vector<char> reached_live(m.graph().state_count(), 0);
        std::vector<char> reached_dead(m.graph().state_count(), 0);
        std::set<std::pair<StateId, StateId>> seen;
        std::deque<std::tuple<StateId, StateId, std::size_t>> queue;
        StateId sub_start = g_sub.is_null() ? kDead : g_sub.initial();
        queue.push_back({m.graph().initial(), sub_start, 0});
        seen.insert({m.graph().initial(), sub_start});
        while (!queue.empty()) {
            auto [mq, sq, dist] = queue.front();
            queue.pop_front();
            (sq == kDead ? reached_dead : reached_live)[mq] = 1;
            if (dist == depth) {
                continue;
            }
            for (EventId e = 0; e < g.alphabet().size(); ++e) {
                auto m_next = m.graph().target(mq, e);
                if (!m_next) {
                    continue;  // word leaves L(g); rho's third cell
                }
                StateId sub_next = kDead;
                if (sq != kDead) {
                    if (auto t = g_sub.target(sq, e)) {
                        sub_next = *t;
                    }
                }
                if (seen.insert({*m_next, sub_next}).second) {
                    queue.push_back({*m_next, sub_next, dist + 1});
                }
            }
        }
        for (StateId s : m.graph().states()) {
            if (reached_live[s] && reached_dead[s]) {
                report.match_refines_rho = false;
                break;
            }
        }
    }
    return report;
}

}  // namespace desup
