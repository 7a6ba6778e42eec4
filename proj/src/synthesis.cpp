#include "desup/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "desup/observer.hpp"

namespace desup {

namespace {

/// Rebuilds m with a different marked set (payloads untouched).
ProductAutomaton remark_product(const ProductAutomaton& m, std::vector<StateId> marked) {
    const Automaton& g = m.graph();
    std::size_t size = g.states().empty() ? 0 : g.states().back() + 1;
    std::vector<StateId> plant_by_id(size, 0);
    std::vector<std::uint32_t> est_by_id(size, 0);
    for (StateId q : g.states()) {
        plant_by_id[q] = m.plant_state(q);
        est_by_id[q] = m.estimate_index(q);
    }
    Automaton graph(g.alphabet(), g.states(), g.initial(), std::move(marked),
                    g.transitions());
    return ProductAutomaton(std::move(graph), std::move(plant_by_id), std::move(est_by_id),
                            m.estimate_table());
}

/// States whose estimate consists of secret (marked) plant states only.
std::vector<StateId> disclosing_states(const ProductAutomaton& m, const Automaton& g) {
    std::vector<StateId> out;
    for (StateId q : m.graph().states()) {
        const EstimateLabel& est = m.estimate(q);
        bool all_secret = std::all_of(est.members().begin(), est.members().end(),
                                      [&](StateId p) { return g.is_marked(p); });
        if (all_secret) {
            out.push_back(q);
        }
    }
    return out;
}

RefinementStep make_step(const ProductAutomaton& before, const ProductAutomaton& after,
                         const DeltaSet& delta) {
    RefinementStep step;
    for (StateId q : delta) {
        step.delta.push_back(before.payload(q));
    }
    std::sort(step.delta.begin(), step.delta.end());
    std::set<std::pair<EstimateLabel, EstimateLabel>> relabels;
    for (StateId q : before.graph().states()) {
        if (after.is_null() || !after.graph().has_state(q)) {
            step.removed.push_back(before.payload(q));
        } else if (before.estimate(q) != after.estimate(q)) {
            relabels.emplace(before.estimate(q), after.estimate(q));
        }
    }
    std::sort(step.removed.begin(), step.removed.end());
    step.relabels.assign(relabels.begin(), relabels.end());
    return step;
}

}  // namespace

bool verify_current_state_opacity(const Automaton& g) {
    return observe(g).graph.marked().empty();
}

Supervisor synthesize(const Automaton& g, SynthesisTrace* trace) {
    ProductAutomaton m = parallel_compose(g, observe(g));
    while (!m.is_null()) {
        DeltaSet delta(m.graph().marked().begin(), m.graph().marked().end());
        if (delta.empty()) {
            break;
        }
        ProductAutomaton next = refine(m, delta);
        if (!next.is_null()) {
            // Shrunken estimates may now consist of secrets only; those
            // states disclose and become the next round's targets.
            next = remark_product(next, disclosing_states(next, g));
        }
        if (trace != nullptr) {
            trace->steps.push_back(make_step(m, next, delta));
        }
        m = std::move(next);
    }
    return Supervisor{std::move(m)};
}

Supervisor synthesize_fast(const Automaton& g) {
    ProductAutomaton m = parallel_compose(g, observe(g));
    if (m.is_null()) {
        return Supervisor{std::move(m)};
    }
    const Automaton& graph = m.graph();
    const EventSet controllable = graph.alphabet().controllable();
    const StateId initial = graph.initial();
    const std::size_t n = graph.state_count();  // composed ids are dense 0..n-1

    std::vector<std::vector<std::pair<StateId, EventId>>> in_edges(n);
    std::vector<std::uint32_t> live_in_degree(n, 0);
    for (const Transition& t : graph.transitions()) {
        in_edges[t.dst].push_back({t.src, t.event});
        ++live_in_degree[t.dst];
    }

    // The estimate table, kept keyed by label value. slot[i] lists the states
    // currently labelled by labels[i]; merged-away indices have empty slots.
    std::vector<EstimateLabel> labels = m.estimate_table();
    std::vector<std::uint32_t> est_of(n);
    std::vector<std::vector<StateId>> slot(labels.size());
    std::unordered_map<EstimateLabel, std::uint32_t, EstimateLabelHash> index_of;
    for (std::uint32_t i = 0; i < labels.size(); ++i) {
        index_of.emplace(labels[i], i);
    }
    std::vector<StateId> plant_of(n);
    for (StateId q = 0; q < n; ++q) {
        plant_of[q] = m.plant_state(q);
        est_of[q] = m.estimate_index(q);
        slot[est_of[q]].push_back(q);
    }

    std::vector<char> alive(n, 1);
    std::vector<char> doomed(n, 0);  // queued for removal
    std::deque<StateId> queue;
    auto doom = [&](StateId q) {
        if (!doomed[q]) {
            doomed[q] = 1;
            queue.push_back(q);
        }
    };
    auto all_secret = [&](const EstimateLabel& label) {
        return std::all_of(label.members().begin(), label.members().end(),
                           [&](StateId p) { return g.is_marked(p); });
    };
    for (StateId q : graph.marked()) {
        doom(q);
    }

    while (true) {
        while (!queue.empty()) {
            StateId q = queue.front();
            queue.pop_front();
            if (!alive[q]) {
                continue;
            }
            if (q == initial) {
                return Supervisor{ProductAutomaton::null_product(graph.alphabet())};
            }
            // A state the plant can be forced into is as good as removed.
            for (auto [src, event] : in_edges[q]) {
                if (alive[src] && !controllable.contains(event)) {
                    doom(src);
                }
            }
            alive[q] = 0;

            // The state's estimate class loses its plant component — unless
            // another member of the class still realizes that component
            // (possible once earlier rounds have split payloads).
            std::uint32_t idx = est_of[q];
            auto& members = slot[idx];
            members.erase(std::find(members.begin(), members.end(), q));
            StateId plant = plant_of[q];
            bool realized_elsewhere =
                std::any_of(members.begin(), members.end(),
                            [&](StateId member) { return plant_of[member] == plant; });
            index_of.erase(labels[idx]);
            EstimateLabel shrunk =
                realized_elsewhere ? labels[idx] : labels[idx].minus({&plant, 1});
            if (auto hit = index_of.find(shrunk);
                hit != index_of.end() && hit->second != idx) {
                // Another class already carries this label: the classes merge.
                std::uint32_t into = hit->second;
                for (StateId member : members) {
                    est_of[member] = into;
                    slot[into].push_back(member);
                }
                members.clear();
                labels[idx] = EstimateLabel{};
                idx = into;
            } else {
                labels[idx] = shrunk;
                if (!shrunk.empty()) {
                    index_of.emplace(shrunk, idx);
                }
            }
            // Did the shrunken (possibly merged) class become all-secret?
            if (!labels[idx].empty() && all_secret(labels[idx])) {
                for (StateId member : slot[idx]) {
                    if (alive[member]) {
                        doom(member);
                    }
                }
            }
            // Keep the live in-degrees exact; an orphaned state is gone too.
            for (const Transition& t : graph.out_transitions(q)) {
                if (alive[t.dst] && --live_in_degree[t.dst] == 0 && t.dst != initial) {
                    doom(t.dst);
                }
            }
        }
        // In-degree bookkeeping cannot see a cut-off cycle feeding itself;
        // sweep for states no longer reachable from the initial state.
        std::vector<char> reached(n, 0);
        std::deque<StateId> bfs{initial};
        reached[initial] = 1;
        while (!bfs.empty()) {
            StateId q = bfs.front();
            bfs.pop_front();
            for (const Transition& t : graph.out_transitions(q)) {
                if (alive[t.dst] && !reached[t.dst]) {
                    reached[t.dst] = 1;
                    bfs.push_back(t.dst);
                }
            }
        }
        bool found = false;
        for (StateId q = 0; q < n; ++q) {
            if (alive[q] && !reached[q]) {
                doom(q);
                found = true;
            }
        }
        if (!found) {
            break;
        }
    }

    // Assemble the surviving product. Estimate indices are compacted; labels
    // are unique by construction of the merge step.
    std::vector<StateId> states;
    for (StateId q = 0; q < n; ++q) {
        if (alive[q]) {
            states.push_back(q);
        }
    }
    std::vector<Transition> transitions;
    for (const Transition& t : graph.transitions()) {
        if (alive[t.src] && alive[t.dst]) {
            transitions.push_back(t);
        }
    }
    std::vector<EstimateLabel> estimates;
    std::unordered_map<std::uint32_t, std::uint32_t> compact;
    std::vector<StateId> plant_by_id(n, 0);
    std::vector<std::uint32_t> est_by_id(n, 0);
    for (StateId q : states) {
        auto [it, inserted] =
            compact.try_emplace(est_of[q], static_cast<std::uint32_t>(estimates.size()));
        if (inserted) {
            estimates.push_back(labels[est_of[q]]);
        }
        plant_by_id[q] = plant_of[q];
        est_by_id[q] = it->second;
    }
    Automaton refined(graph.alphabet(), std::move(states), initial, {},
                      std::move(transitions));
    return Supervisor{ProductAutomaton(std::move(refined), std::move(plant_by_id),
                                       std::move(est_by_id), std::move(estimates))};
}

ControlPattern control_pattern(const Supervisor& s, StateId supervisor_state) {
    if (s.is_null()) {
        throw std::invalid_argument("control_pattern: null supervisor");
    }
    const Automaton& graph = s.realization.graph();
    if (!graph.has_state(supervisor_state)) {
        throw std::invalid_argument("control_pattern: unknown supervisor state " +
                                    std::to_string(supervisor_state));
    }
    ControlPattern pattern;
    pattern.enabled.resize(graph.alphabet().size());
    for (EventId e = 0; e < graph.alphabet().size(); ++e) {
        pattern.enabled[e] = !graph.alphabet().event(e).controllable ||
                             graph.target(supervisor_state, e).has_value();
    }
    return pattern;
}

Automaton closed_loop(const Supervisor& s, const Automaton& g) {
    if (s.is_null()) {
        return Automaton::null_automaton(g.alphabet());
    }
    const Automaton& real = s.realization.graph();
    if (real.alphabet() != g.alphabet()) {
        throw std::invalid_argument("closed_loop: supervisor and plant alphabets differ");
    }
    // The realization already runs in lockstep with the plant (its states
    // carry the plant state they track), so the loop is the realization's
    // graph with marking pulled back from the plant.
    std::vector<StateId> marked;
    for (StateId q : real.states()) {
        StateId plant = s.realization.plant_state(q);
        if (!g.has_state(plant)) {
            throw std::invalid_argument("closed_loop: supervisor tracks unknown plant state " +
                                        std::to_string(plant));
        }
        if (g.is_marked(plant)) {
            marked.push_back(q);
        }
    }
    return Automaton(real.alphabet(), real.states(), real.initial(), std::move(marked),
                     real.transitions());
}

}  // namespace desup
