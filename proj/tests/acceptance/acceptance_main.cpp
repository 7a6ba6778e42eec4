// Acceptance gate for the whole artifact. Runs nine end-to-end criteria,
// prints exactly one [PASS]/[FAIL] line per criterion, and exits nonzero if
// any fail. Each criterion carries its own wall-clock budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "desup/automaton.hpp"
#include "desup/cli.hpp"
#include "desup/desa.hpp"
#include "desup/observer.hpp"
#include "desup/oracle.hpp"
#include "desup/product.hpp"
#include "desup/refine.hpp"
#include "desup/relations.hpp"
#include "desup/synthesis.hpp"

using namespace desup;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& what) {
        if (ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string fixture(const std::string& name) {
    return std::string(DESUP_FIXTURE_DIR) + "/" + name;
}

PlantDocument load(const std::string& name) {
    return std::get<PlantDocument>(parse_desa_file(fixture(name)));
}

StateId id_of(const PlantDocument& doc, const std::string& state_name) {
    auto it = std::find(doc.state_names.begin(), doc.state_names.end(),
                        state_name);
    return static_cast<StateId>(it - doc.state_names.begin());
}

std::string run_cli_capture(const std::vector<std::string>& args, int* code) {
    std::ostringstream out, err;
    int c = run_cli(args, out, err);
    if (code) *code = c;
    return out.str();
}

// ---------------------------------------------------------------------------
// 1. Two-stage worked example: the first removal manufactures a second
//    disclosure; synthesis needs exactly two rounds and lands on a known
//    seven-state supervisor.

const char* kTwoStageSupervisor =
    "event alpha ctrl unobs\n"
    "event beta unctrl obs\n"
    "event gamma ctrl unobs\n"
    "event lambda ctrl obs\n"
    "state q01|q01\n"
    "state q02|q02,q05\n"
    "state q03|q03,q04,q08\n"
    "state q04|q03,q04,q08\n"
    "state q05|q02,q05\n"
    "state q07|q07\n"
    "state q08|q03,q04,q08\n"
    "initial q01|q01\n"
    "trans q01|q01 beta q02|q02,q05\n"
    "trans q01|q01 lambda q03|q03,q04,q08\n"
    "trans q02|q02,q05 alpha q05|q02,q05\n"
    "trans q03|q03,q04,q08 alpha q04|q03,q04,q08\n"
    "trans q04|q03,q04,q08 gamma q08|q03,q04,q08\n"
    "trans q05|q02,q05 lambda q07|q07\n"
    "trans q07|q07 lambda q03|q03,q04,q08\n";

Check criterion_two_stage() {
    Check c;
    PlantDocument doc = load("two_stage.desa");
    SynthesisTrace trace;
    Supervisor s = synthesize(doc.automaton, &trace);
    if (s.is_null()) {
        c.fail("supervisor is null");
        return c;
    }
    if (trace.steps.size() != 2) {
        c.fail("expected 2 refinement rounds, got " +
               std::to_string(trace.steps.size()));
        return c;
    }

    auto payloads = [](const std::vector<ProductPayload>& v) {
        return std::multiset<ProductPayload>(v.begin(), v.end());
    };
    StateId q06 = id_of(doc, "q06"), q09 = id_of(doc, "q09"),
            q10 = id_of(doc, "q10");

    const RefinementStep& one = trace.steps[0];
    if (payloads(one.delta) !=
        std::multiset<ProductPayload>{{q10, EstimateLabel{{q10}}}}) {
        c.fail("round 1 delta mismatch");
    }
    if (payloads(one.removed) !=
        std::multiset<ProductPayload>{{q09, EstimateLabel{{q06, q09}}},
                                      {q10, EstimateLabel{{q10}}}}) {
        c.fail("round 1 removal set mismatch");
    }
    if (one.relabels.size() != 1 ||
        !(one.relabels[0].first == EstimateLabel{{q06, q09}}) ||
        !(one.relabels[0].second == EstimateLabel{{q06}})) {
        c.fail("round 1 relabel mismatch");
    }
    const RefinementStep& two = trace.steps[1];
    if (payloads(two.delta) !=
            std::multiset<ProductPayload>{{q06, EstimateLabel{{q06}}}} ||
        payloads(two.removed) != payloads(two.delta)) {
        c.fail("round 2 mismatch");
    }

    if (!s.realization.graph().marked().empty()) {
        c.fail("final realization still has marked states");
    }
    std::string text =
        serialize(ProductDocument{s.realization, doc.state_names});
    if (text != kTwoStageSupervisor) {
        c.fail("final realization differs from the expected supervisor");
    }
    if (!verify_current_state_opacity(closed_loop(s, doc.automaton))) {
        c.fail("closed loop is not opaque");
    }
    return c;
}

// ---------------------------------------------------------------------------
// 2. Splitting example: one plant state under several estimates; the
//    supervisor grants exactly three a-steps into the secret.

Check criterion_counting() {
    Check c;
    PlantDocument doc = load("counting.desa");
    const Automaton& g = doc.automaton;
    StateId q8 = id_of(doc, "q8"), q9 = id_of(doc, "q9");

    ProductAutomaton m = parallel_compose(g, observe(g));
    std::set<EstimateLabel> estimates_of_q8;
    for (StateId q : m.graph().states()) {
        if (m.plant_state(q) == q8) estimates_of_q8.insert(m.estimate(q));
    }
    if (estimates_of_q8.size() < 2) {
        c.fail("plant state q8 not split across estimates in the product");
    }

    ObserverAutomaton h = observe(g);
    if (h.graph.marked().size() != 1 ||
        !(h.label_of(h.graph.marked().front()) == EstimateLabel{{q8, q9}})) {
        c.fail("observer should mark exactly the estimate {q8,q9}");
    }

    Supervisor s = synthesize(g);
    if (s.is_null()) {
        c.fail("supervisor is null");
        return c;
    }
    EventId a = *g.alphabet().find("a");
    std::size_t into_secret = 0;
    for (const Transition& t : s.realization.graph().transitions()) {
        if (t.event == a && s.realization.plant_state(t.dst) == q8) {
            ++into_secret;
        }
    }
    if (into_secret != 3) {
        c.fail("expected 3 a-transitions into q8, got " +
               std::to_string(into_secret));
    }

    std::size_t best = 0;
    for (const Word& w : bounded_language(closed_loop(s, g), 8)) {
        best = std::max(best, static_cast<std::size_t>(
                                  std::count(w.begin(), w.end(), a)));
    }
    if (best != 3) {
        c.fail("closed loop permits " + std::to_string(best) +
               " a-steps, expected 3");
    }
    return c;
}

// ---------------------------------------------------------------------------
// 3. Observer containment: the observer of any subautomaton estimates a
//    subset, pointwise along shared observations.

Check criterion_subobservers() {
    Check c;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed;
        Automaton g = random_automaton(cfg);
        Automaton sub = random_subautomaton(g, seed ^ 0x9e3779b97f4a7c15ull);
        if (!is_subobserver(observe(sub), observe(g))) {
            c.fail("seed " + std::to_string(seed));
            return c;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 4. Incremental refinement equals recomputation from scratch on shaped
//    removal sets.

Check criterion_refine_vs_naive() {
    Check c;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed;
        Automaton g = random_automaton(cfg);
        ProductAutomaton m = parallel_compose(g, observe(g));
        DeltaSet delta = random_refinable_delta(m, seed * 2654435761u + 17);
        ProductAutomaton fast = refine(m, delta);
        ProductAutomaton slow = naive_refine(m, delta);
        if (!canonically_equal(fast, slow)) {
            c.fail("seed " + std::to_string(seed) + ": " +
                   canonical_diff(fast, slow));
            return c;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 5. Supervisor correctness and maximality: (a) closed loops are opaque,
//    (b) on small instances the closed-loop language is a brute-force
//    maximum, (c) re-enabling any single disabled controllable transition
//    breaks opacity.

Automaton reenabled_loop(const Automaton& g, const ProductAutomaton& m0,
                         const ProductAutomaton& realization,
                         const Transition& extra) {
    // Minimal closed-loop extension: the supervisor's edges, plus the
    // re-enabled transition, plus — for every dead state this makes
    // reachable — its uncontrollable out-edges (which no supervisor may
    // remove). Controllable edges at dead states stay disabled.
    const Automaton& full = m0.graph();
    const EventSet controllable = full.alphabet().controllable();
    std::vector<Transition> edges = realization.graph().transitions();
    edges.push_back(extra);

    std::set<StateId> expanded;
    std::vector<StateId> frontier{extra.dst};
    while (!frontier.empty()) {
        StateId q = frontier.back();
        frontier.pop_back();
        if (realization.graph().has_state(q) || !expanded.insert(q).second) {
            continue;
        }
        for (const Transition& t : full.out_transitions(q)) {
            if (controllable.contains(t.event)) continue;
            edges.push_back(t);
            frontier.push_back(t.dst);
        }
    }

    Automaton candidate = accessible(
        Automaton(full.alphabet(), full.states(), full.initial(), {}, edges));
    std::vector<StateId> marked;
    for (StateId q : candidate.states()) {
        if (g.is_marked(m0.plant_state(q))) marked.push_back(q);
    }
    return Automaton(candidate.alphabet(), candidate.states(),
                     candidate.initial(), marked, candidate.transitions());
}

Check criterion_supervisors() {
    Check c;

    // (a) 1000 random plants: a non-null supervisor's loop is opaque.
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed;
        Automaton g = random_automaton(cfg);
        Supervisor s = synthesize(g);
        if (s.is_null()) continue;
        if (!verify_current_state_opacity(closed_loop(s, g))) {
            c.fail("(a) seed " + std::to_string(seed));
            return c;
        }
    }

    // (b) small instances: the closed-loop bounded language is one of the
    // brute-force maximal opaque languages, and null means none exists.
    std::size_t compared = 0;
    for (std::uint64_t seed = 1; compared < 200 && seed <= 4000; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed * 7919;
        cfg.max_states = 5;
        cfg.max_events = 3;
        Automaton g = random_automaton(cfg);
        BruteForceResult brute;
        try {
            brute = brute_force_supervisors(g, 12);
        } catch (const std::invalid_argument&) {
            continue;
        }
        ++compared;
        ProductAutomaton m0 = parallel_compose(g, observe(g));
        Supervisor s = synthesize(g);
        if (s.is_null()) {
            if (!brute.maximal_languages.empty()) {
                c.fail("(b) seed " + std::to_string(seed) +
                       ": null supervisor but opaque candidates exist");
                return c;
            }
            continue;
        }
        auto language = bounded_language(closed_loop(s, g),
                                         2 * m0.graph().state_count());
        if (std::count(brute.maximal_languages.begin(),
                       brute.maximal_languages.end(), language) != 1) {
            c.fail("(b) seed " + std::to_string(seed) +
                   ": closed-loop language is not a brute-force maximum");
            return c;
        }
    }
    if (compared < 200) {
        c.fail("(b) too few comparable instances: " + std::to_string(compared));
        return c;
    }

    // (c) local maximality: every single re-enabled controllable transition
    // (live source, removed target) yields a non-opaque loop.
    std::size_t reenabled = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed * 104729;
        Automaton g = random_automaton(cfg);
        Supervisor s = synthesize(g);
        if (s.is_null()) continue;
        ProductAutomaton m0 = parallel_compose(g, observe(g));
        const EventSet controllable = m0.graph().alphabet().controllable();
        for (const Transition& t : m0.graph().transitions()) {
            if (!controllable.contains(t.event)) continue;
            if (!s.realization.graph().has_state(t.src)) continue;
            if (s.realization.graph().target(t.src, t.event)) continue;
            ++reenabled;
            Automaton loop = reenabled_loop(g, m0, s.realization, t);
            if (verify_current_state_opacity(loop)) {
                c.fail("(c) seed " + std::to_string(seed) +
                       ": re-enabling a removed transition kept the loop "
                       "opaque");
                return c;
            }
        }
    }
    if (reenabled < 50) {
        c.fail("(c) too few re-enablements sampled: " +
               std::to_string(reenabled));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 6. The reference loop and the fast worklist build the same supervisors.

Check criterion_fast_synthesis() {
    Check c;
    auto agree = [&](const Automaton& g, const std::string& label) {
        Supervisor slow = synthesize(g);
        Supervisor fast = synthesize_fast(g);
        if (slow.is_null() != fast.is_null()) {
            c.fail(label + ": feasibility disagreement");
            return false;
        }
        if (!slow.is_null() &&
            !canonically_equal(slow.realization, fast.realization)) {
            c.fail(label + ": different realizations");
            return false;
        }
        return true;
    };

    if (!agree(load("two_stage.desa").automaton, "two_stage")) return c;
    if (!agree(load("counting.desa").automaton, "counting")) return c;
    if (!agree(load("unenforceable.desa").automaton, "unenforceable")) return c;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed ^ 0xabcdef12345ull;
        if (!agree(random_automaton(cfg), "seed " + std::to_string(seed))) {
            return c;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 7. Bounded structural invariants on random instances.

Check criterion_invariants() {
    Check c;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed * 31 + 1;
        Automaton g = random_automaton(cfg);
        Automaton sub = random_subautomaton(g, seed + 5000);
        EventSet obs = g.alphabet().adversary_observable();

        // Unobservable reach only shrinks in a subautomaton.
        for (StateId q : sub.states()) {
            auto small = epsilon_reach(sub, q, obs);
            auto big = epsilon_reach(g, q, obs);
            if (!std::includes(big.begin(), big.end(), small.begin(),
                               small.end())) {
                c.fail("reach seed " + std::to_string(seed));
                return c;
            }
        }

        // Every product state carries its exact plant state and estimate.
        ProductAutomaton m = parallel_compose(g, observe(g));
        if (!check_state_consistency(m, g, 2 * m.graph().state_count())) {
            c.fail("consistency seed " + std::to_string(seed));
            return c;
        }

        // Word matching coincides with product-state equality.
        if (!relation_check(g, sub, 8).match_equals_product_eq) {
            c.fail("match seed " + std::to_string(seed));
            return c;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 8. Scaling: refine grows linearly with product size and clearly beats
//    recomputation at the top end.

Check criterion_bench() {
    Check c;
    int code = 0;
    std::string csv = run_cli_capture({"bench", "--min-states", "100",
                                       "--max-states", "10000", "--trials",
                                       "3"},
                                      &code);
    if (code != 0) {
        c.fail("bench exited with " + std::to_string(code));
        return c;
    }
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    std::vector<double> sizes, refine_s, naive_s;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double n, r, v, s;
        if (row >> n >> r >> v >> s) {
            sizes.push_back(n);
            refine_s.push_back(r);
            naive_s.push_back(v);
        }
    }
    if (sizes.size() < 5) {
        c.fail("too few data points: " + std::to_string(sizes.size()));
        return c;
    }

    // Least-squares fit refine_seconds ~ a * product_states + b.
    double n = static_cast<double>(sizes.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        sx += sizes[i];
        sy += refine_s[i];
        sxx += sizes[i] * sizes[i];
        sxy += sizes[i] * refine_s[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        double fit = slope * sizes[i] + intercept;
        ss_res += (refine_s[i] - fit) * (refine_s[i] - fit);
        ss_tot += (refine_s[i] - sy / n) * (refine_s[i] - sy / n);
    }
    double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    double speedup = naive_s.back() / refine_s.back();

    std::ostringstream stats;
    stats << "R^2=" << r2 << ", top-end speedup=" << speedup << "x";
    if (r2 < 0.9) {
        c.fail("refine does not scale linearly: " + stats.str());
    } else if (speedup < 5.0) {
        c.fail("refine not 5x faster than recomputation: " + stats.str());
    } else {
        c.detail = stats.str();
    }
    return c;
}

// ---------------------------------------------------------------------------
// 9. Serialization round-trips bit-exactly; CLI output is reproducible.

Check criterion_determinism() {
    Check c;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed + 31337;
        PlantDocument doc = plant_document(random_automaton(cfg));
        std::string text = serialize(doc);
        PlantDocument back = std::get<PlantDocument>(parse_desa(text));
        if (!(back.automaton == doc.automaton) || serialize(back) != text) {
            c.fail("round-trip seed " + std::to_string(seed));
            return c;
        }
    }

    std::vector<std::vector<std::string>> invocations = {
        {"observe", fixture("f1.desa")},
        {"compose", fixture("counting.desa")},
        {"synthesize", fixture("two_stage.desa")},
        {"gen-random", "--seed", "7", "--states", "40", "--events", "4"},
    };
    for (const auto& args : invocations) {
        int code1 = 0, code2 = 0;
        std::string first = run_cli_capture(args, &code1);
        std::string second = run_cli_capture(args, &code2);
        if (code1 != code2 || first != second || first.empty()) {
            c.fail("CLI output not reproducible for '" + args[0] + "'");
            return c;
        }
    }
    return c;
}

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Check()> run;
};

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"two-stage worked example", 1.0, criterion_two_stage},
        {"estimate-splitting worked example", 1.0, criterion_counting},
        {"subautomata yield subobservers (1000 trials)", 60.0,
         criterion_subobservers},
        {"incremental refine matches recomputation (1000 trials)", 120.0,
         criterion_refine_vs_naive},
        {"supervisors: opacity, brute-force maximum, local maximality", 300.0,
         criterion_supervisors},
        {"reference and fast synthesis agree (1000 trials)", 120.0,
         criterion_fast_synthesis},
        {"bounded structural invariants (200 trials)", 60.0,
         criterion_invariants},
        {"refine scales linearly and beats recomputation", 0.0,
         criterion_bench},
        {"serialization round-trip and CLI determinism", 30.0,
         criterion_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Check check;
        try {
            check = criteria[i].run();
        } catch (const std::exception& e) {
            check.fail(std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        if (check.ok && criteria[i].budget_seconds > 0 &&
            elapsed > criteria[i].budget_seconds) {
            check.fail("over budget (" + std::to_string(elapsed) + " s > " +
                       std::to_string(criteria[i].budget_seconds) + " s)");
        }

        std::ostringstream line;
        line << (check.ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
             << criteria[i].name << " (" << std::fixed << std::setprecision(2)
             << elapsed << " s)";
        if (!check.detail.empty()) {
            line << " — " << check.detail;
        }
        std::cout << line.str() << std::endl;
        if (!check.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
