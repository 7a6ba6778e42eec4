#include "desup/refine.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace desup {

namespace {

/// Scratch space shared by closure and reachability. Product ids are bounded
/// by the size of the originally composed product (refinement only removes
/// states), so dense arrays indexed by id are safe and fast.
struct Workspace {
    explicit Workspace(const ProductAutomaton& m) {
        StateId max_id = m.graph().states().empty() ? 0 : m.graph().states().back();
        size = static_cast<std::size_t>(max_id) + 1;
        reverse.resize(size);
        for (const Transition& t : m.graph().transitions()) {
            reverse[t.dst].push_back({t.src, t.event});
        }
    }

    std::size_t size = 0;
    std::vector<std::vector<std::pair<StateId, EventId>>> reverse;
};

void validate_delta(const ProductAutomaton& m, const DeltaSet& delta) {
    for (StateId q : delta) {
        if (!m.graph().has_state(q)) {
            throw std::invalid_argument("refine: unknown product state " + std::to_string(q));
        }
    }
}

/// Flags[q] = true for every state with an uncontrollable path into delta.
std::vector<char> closure_flags(const ProductAutomaton& m, const DeltaSet& delta,
                                const Workspace& ws) {
    const EventSet controllable = m.graph().alphabet().controllable();
    std::vector<char> in_closure(ws.size, 0);
    std::deque<StateId> worklist;
    for (StateId q : delta) {
        if (!in_closure[q]) {
            in_closure[q] = 1;
            worklist.push_back(q);
        }
    }
    while (!worklist.empty()) {
        StateId q = worklist.front();
        worklist.pop_front();
        for (auto [src, event] : ws.reverse[q]) {
            if (!controllable.contains(event) && !in_closure[src]) {
                in_closure[src] = 1;
                worklist.push_back(src);
            }
        }
    }
    return in_closure;
}

}  // namespace

DeltaSet uncontrollable_closure(const ProductAutomaton& m, const DeltaSet& delta) {
    validate_delta(m, delta);
    if (delta.empty()) {
        return {};
    }
    Workspace ws(m);
    std::vector<char> flags = closure_flags(m, delta, ws);
    DeltaSet out;
    for (StateId q : m.graph().states()) {
        if (flags[q]) {
            out.push_back(q);
        }
    }
    return out;
}

ProductAutomaton refine(const ProductAutomaton& m, const DeltaSet& delta) {
    validate_delta(m, delta);
    if (delta.empty()) {
        return m;
    }
    const Automaton& graph = m.graph();
    Workspace ws(m);
    std::vector<char> removed = closure_flags(m, delta, ws);
    if (removed[graph.initial()]) {
        return ProductAutomaton::null_product(graph.alphabet());
    }

    // Reachability over what is left; anything cut off goes too.
    std::vector<char> reachable(ws.size, 0);
    std::deque<StateId> queue{graph.initial()};
    reachable[graph.initial()] = 1;
    while (!queue.empty()) {
        StateId q = queue.front();
        queue.pop_front();
        for (const Transition& t : graph.out_transitions(q)) {
            if (!removed[t.dst] && !reachable[t.dst]) {
                reachable[t.dst] = 1;
                queue.push_back(t.dst);
            }
        }
    }

    // A surviving class keeps exactly the plant components its surviving
    // members still realize. (After earlier refinements one component can be
    // realized by several members of a class; it stays until the last goes.)
    std::unordered_map<std::uint32_t, std::vector<StateId>> kept_comps;
    std::vector<StateId> survivors;
    for (StateId q : graph.states()) {
        if (reachable[q]) {
            survivors.push_back(q);
            kept_comps[m.estimate_index(q)].push_back(m.plant_state(q));
        }
    }

    // Relabel surviving classes, re-interning by value. Two classes may
    // legitimately converge to one label (they merge). Two surviving states
    // may then share a payload; they stay distinct states, because they can
    // still differ in which events survived around them.
    std::vector<EstimateLabel> estimates;
    std::unordered_map<EstimateLabel, std::uint32_t, EstimateLabelHash> index_of;
    std::unordered_map<std::uint32_t, std::uint32_t> new_index;  // old -> new
    std::vector<StateId> plant_by_id(ws.size, 0);
    std::vector<std::uint32_t> est_by_id(ws.size, 0);
    for (StateId q : survivors) {
        std::uint32_t old_idx = m.estimate_index(q);
        auto mapped = new_index.find(old_idx);
        std::uint32_t idx;
        if (mapped != new_index.end()) {
            idx = mapped->second;
        } else {
            EstimateLabel label{kept_comps.at(old_idx)};
            auto [slot, inserted] =
                index_of.try_emplace(label, static_cast<std::uint32_t>(estimates.size()));
            if (inserted) {
                estimates.push_back(std::move(label));
            }
            idx = slot->second;
            new_index.emplace(old_idx, idx);
        }
        plant_by_id[q] = m.plant_state(q);
        est_by_id[q] = idx;
    }

    std::vector<StateId> marked;
    for (StateId q : graph.marked()) {
        if (reachable[q]) {
            marked.push_back(q);
        }
    }
    std::vector<Transition> transitions;
    for (const Transition& t : graph.transitions()) {
        if (reachable[t.src] && reachable[t.dst]) {
            transitions.push_back(t);
        }
    }

    Automaton refined(graph.alphabet(), std::move(survivors), graph.initial(),
                      std::move(marked), std::move(transitions));
    return ProductAutomaton(std::move(refined), std::move(plant_by_id), std::move(est_by_id),
                            std::move(estimates));
}

}  // namespace desup
