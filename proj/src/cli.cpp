#include "desup/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "desup/desa.hpp"
#include "desup/observer.hpp"
#include "desup/oracle.hpp"
#include "desup/product.hpp"
#include "desup/refine.hpp"
#include "desup/relations.hpp"
#include "desup/synthesis.hpp"

namespace desup {

namespace {

PlantDocument load_plant(const std::string& path) {
    DesaDocument doc = parse_desa_file(path);
    if (is_product(doc)) {
        throw std::runtime_error(path + ": expected a plain automaton document, got a product");
    }
    return std::get<PlantDocument>(std::move(doc));
}

ProductDocument load_product(const std::string& path) {
    DesaDocument doc = parse_desa_file(path);
    if (!is_product(doc)) {
        throw std::runtime_error(path + ": expected a product document");
    }
    return std::get<ProductDocument>(std::move(doc));
}

void write_text(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write '" + out_path + "'");
    }
    file << text;
}

/// Splits a --delta argument into product state names. Commas both separate
/// names and appear inside them ("q|a,b"), so a new name starts exactly at a
/// piece that contains the '|' separator.
std::vector<std::string> split_delta(const std::string& arg) {
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (start <= arg.size()) {
        std::size_t comma = arg.find(',', start);
        if (comma == std::string::npos) {
            pieces.push_back(arg.substr(start));
            break;
        }
        pieces.push_back(arg.substr(start, comma - start));
        start = comma + 1;
    }
    std::vector<std::string> names;
    std::string current;
    for (const std::string& piece : pieces) {
        if (piece.empty()) {
            continue;
        }
        if (current.empty()) {
            current = piece;
        } else if (piece.find('|') != std::string::npos) {
            names.push_back(current);
            current = piece;
        } else {
            current += "," + piece;
        }
    }
    if (!current.empty()) {
        names.push_back(current);
    }
    return names;
}

/// Rebuilds `sub`'s automaton in `parent`'s state-id space, matching states
/// by display name. Returns nullopt when a state of sub has no counterpart
/// or the alphabets differ — in that case the relation cannot hold.
std::optional<Automaton> remap_by_names(const PlantDocument& sub,
                                        const PlantDocument& parent) {
    if (!(sub.automaton.alphabet() == parent.automaton.alphabet())) {
        return std::nullopt;
    }
    if (sub.automaton.is_null()) {
        return Automaton::null_automaton(sub.automaton.alphabet());
    }
    auto parent_id = [&](StateId q) -> std::optional<StateId> {
        const std::string& name = sub.state_names[q];
        auto it = std::lower_bound(parent.state_names.begin(), parent.state_names.end(),
                                   name);
        if (it == parent.state_names.end() || *it != name) {
            return std::nullopt;
        }
        return static_cast<StateId>(it - parent.state_names.begin());
    };
    std::vector<StateId> states;
    std::vector<StateId> marked;
    for (StateId q : sub.automaton.states()) {
        auto mapped = parent_id(q);
        if (!mapped) {
            return std::nullopt;
        }
        states.push_back(*mapped);
        if (sub.automaton.is_marked(q)) {
            marked.push_back(*mapped);
        }
    }
    std::vector<Transition> transitions;
    for (const Transition& t : sub.automaton.transitions()) {
        transitions.push_back({*parent_id(t.src), t.event, *parent_id(t.dst)});
    }
    return Automaton(sub.automaton.alphabet(), std::move(states),
                     *parent_id(sub.automaton.initial()), std::move(marked),
                     std::move(transitions));
}

// --------------------------------------------------------------------------
// fuzz: differential trials pitting the incremental algorithms against the
// from-scratch oracles on random plants.

struct FuzzOutcome {
    bool ok = true;
    std::string detail;
};

FuzzOutcome fuzz_trial(std::uint64_t seed, std::size_t max_states,
                       std::size_t max_events) {
    FuzzOutcome outcome;
    auto failed = [&](std::string detail) {
        outcome.ok = false;
        outcome.detail = std::move(detail);
        return outcome;
    };
    try {
        RandomConfig cfg;
        cfg.seed = seed;
        cfg.max_states = max_states;
        cfg.max_events = max_events;
        Automaton g = random_automaton(cfg);
        ProductAutomaton m = parallel_compose(g, observe(g));

        DeltaSet delta = random_refinable_delta(m, seed ^ 0x5eedc0ffee0ddba1ull);
        ProductAutomaton incremental = refine(m, delta);
        ProductAutomaton reference = naive_refine(m, delta);
        if (!canonically_equal(incremental, reference)) {
            return failed("refine disagrees with naive recomputation:\n" +
                          canonical_diff(incremental, reference));
        }

        Supervisor loop_version = synthesize(g);
        Supervisor fast_version = synthesize_fast(g);
        if (loop_version.is_null() != fast_version.is_null()) {
            return failed("synthesize and synthesize_fast disagree about feasibility");
        }
        if (!loop_version.is_null() &&
            !canonically_equal(loop_version.realization, fast_version.realization)) {
            return failed("synthesize and synthesize_fast build different supervisors:\n" +
                          canonical_diff(loop_version.realization,
                                         fast_version.realization));
        }
        if (!loop_version.is_null() &&
            !verify_current_state_opacity(closed_loop(loop_version, g))) {
            return failed("synthesized closed loop is not opaque");
        }

        Automaton sub = random_subautomaton(g, seed ^ 0xfeedfacecafef00dull);
        if (!is_subautomaton(sub, g)) {
            return failed("random_subautomaton broke the subautomaton relation");
        }
        if (!is_subobserver(observe(sub), observe(g))) {
            return failed("observer of a subautomaton is not a subobserver");
        }
    } catch (const std::exception& e) {
        return failed(std::string("exception: ") + e.what());
    }
    return outcome;
}

// --------------------------------------------------------------------------
// bench: a scalable plant family with constant-width estimates.
//
// Four lanes of `stages` clusters; each cluster is a chain of 8 states linked
// by an unobservable drift event, all of which fire the observable cycle
// event into the next cluster. A root state fans out unobservably into every
// lane, so the adversary always confuses the four lanes with each other. The
// final stage is marked, giving synthesis real work. Product size is
// 32 * stages + 33.

constexpr std::size_t kBenchLanes = 4;
constexpr std::size_t kBenchSlots = 8;

Automaton bench_family(std::size_t stages) {
    auto at = [&](std::size_t lane, std::size_t stage, std::size_t slot) {
        return static_cast<StateId>(1 + (lane * stages + stage) * kBenchSlots + slot);
    };
    std::vector<Event> events;
    events.push_back({"drift", false, false});
    events.push_back({"go", true, true});
    for (std::size_t lane = 0; lane < kBenchLanes; ++lane) {
        events.push_back({"start" + std::to_string(lane), false, false});
    }
    Alphabet alphabet(std::move(events));
    EventId drift = *alphabet.find("drift");
    EventId go = *alphabet.find("go");

    std::size_t n = 1 + kBenchLanes * stages * kBenchSlots;
    std::vector<StateId> states(n);
    for (StateId q = 0; q < n; ++q) {
        states[q] = q;
    }
    std::vector<Transition> transitions;
    std::vector<StateId> marked;
    for (std::size_t lane = 0; lane < kBenchLanes; ++lane) {
        transitions.push_back(
            {0, *alphabet.find("start" + std::to_string(lane)), at(lane, 0, 0)});
        for (std::size_t stage = 0; stage < stages; ++stage) {
            for (std::size_t slot = 0; slot < kBenchSlots; ++slot) {
                if (slot + 1 < kBenchSlots) {
                    transitions.push_back(
                        {at(lane, stage, slot), drift, at(lane, stage, slot + 1)});
                }
                transitions.push_back(
                    {at(lane, stage, slot), go, at(lane, (stage + 1) % stages, 0)});
                if (stage + 1 == stages) {
                    marked.push_back(at(lane, stage, slot));
                }
            }
        }
    }
    return Automaton(std::move(alphabet), std::move(states), 0, std::move(marked),
                     std::move(transitions));
}

volatile std::size_t benchmark_sink = 0;

template <typename F>
double time_median(std::size_t trials, F&& body) {
    std::vector<double> seconds;
    for (std::size_t i = 0; i < std::max<std::size_t>(trials, 1); ++i) {
        auto start = std::chrono::steady_clock::now();
        body();
        auto stop = std::chrono::steady_clock::now();
        seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(seconds.begin(), seconds.end());
    return seconds[seconds.size() / 2];
}

int run_bench(std::size_t min_states, std::size_t max_states, std::size_t trials,
              std::ostream& out) {
    if (min_states < 80 || max_states < min_states) {
        throw std::runtime_error("bench: need 80 <= min-states <= max-states");
    }
    std::vector<std::size_t> stage_counts;
    constexpr int kPoints = 7;
    for (int i = 0; i < kPoints; ++i) {
        double target = static_cast<double>(min_states) *
                        std::pow(static_cast<double>(max_states) / min_states,
                                 static_cast<double>(i) / (kPoints - 1));
        auto stages = static_cast<std::size_t>(
            std::max(2.0, std::ceil((target - 33.0) / 32.0)));
        if (stage_counts.empty() || stages > stage_counts.back()) {
            stage_counts.push_back(stages);
        }
    }

    out << "product_states,refine_seconds,naive_seconds,synthesize_seconds\n";
    for (std::size_t stages : stage_counts) {
        Automaton g = bench_family(stages);
        ProductAutomaton m = parallel_compose(g, observe(g));
        // Remove the tail of lane 0's last cluster: the uncontrollable drift
        // chain comes with it and the whole last-stage estimate shrinks.
        StateId doomed_plant = static_cast<StateId>(
            1 + (0 * stages + (stages - 1)) * kBenchSlots + (kBenchSlots - 1));
        DeltaSet delta;
        for (StateId q : m.graph().states()) {
            if (m.plant_state(q) == doomed_plant) {
                delta.push_back(q);
            }
        }
        double refine_s = time_median(trials, [&] {
            benchmark_sink = benchmark_sink + refine(m, delta).graph().state_count();
        });
        double naive_s = time_median(trials, [&] {
            benchmark_sink = benchmark_sink + naive_refine(m, delta).graph().state_count();
        });
        double synth_s = time_median(trials, [&] {
            benchmark_sink =
                benchmark_sink + synthesize(g).realization.graph().state_count();
        });
        out << m.graph().state_count() << ',' << std::setprecision(9) << std::fixed
            << refine_s << ',' << naive_s << ',' << synth_s << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"opacity-enforcing supervisor synthesis for discrete-event systems"};
    app.require_subcommand(1);
    int result = kExitOk;

    // ---- observe ----------------------------------------------------------
    std::string observe_in;
    std::string observe_out;
    auto* observe_cmd =
        app.add_subcommand("observe", "Determinize a plant into the adversary's observer");
    observe_cmd->add_option("input", observe_in, "plant .desa file")->required();
    observe_cmd->add_option("-o,--output", observe_out, "output file (default stdout)");
    observe_cmd->callback([&] {
        PlantDocument doc = load_plant(observe_in);
        ObserverAutomaton h = observe(doc.automaton);
        // Observer states are named after their estimates: members joined by '+'.
        std::vector<std::string> names;
        for (const EstimateLabel& label : h.labels) {
            std::string name;
            for (std::size_t i = 0; i < label.members().size(); ++i) {
                if (i > 0) {
                    name += '+';
                }
                name += doc.name_of(label.members()[i]);
            }
            names.push_back(std::move(name));
        }
        write_text(serialize(plant_document(std::move(h.graph), std::move(names))),
                   observe_out, out);
        result = kExitOk;
    });

    // ---- compose ----------------------------------------------------------
    std::string compose_in;
    std::string compose_out;
    auto* compose_cmd = app.add_subcommand(
        "compose", "Build the plant-observer product (the supervisor skeleton)");
    compose_cmd->add_option("input", compose_in, "plant .desa file")->required();
    compose_cmd->add_option("-o,--output", compose_out, "output file (default stdout)");
    compose_cmd->callback([&] {
        PlantDocument doc = load_plant(compose_in);
        ProductAutomaton m = parallel_compose(doc.automaton, observe(doc.automaton));
        write_text(serialize(ProductDocument{std::move(m), doc.state_names}), compose_out,
                   out);
        result = kExitOk;
    });

    // ---- refine -----------------------------------------------------------
    std::string refine_in;
    std::string refine_out;
    std::string refine_delta;
    auto* refine_cmd = app.add_subcommand(
        "refine", "Remove product states and repair the estimates incrementally");
    refine_cmd->add_option("input", refine_in, "product .desa file")->required();
    refine_cmd
        ->add_option("--delta", refine_delta,
                     "comma-separated product state names to remove (e.g. 'q2|q1,q2')")
        ->required();
    refine_cmd->add_option("-o,--output", refine_out, "output file (default stdout)");
    refine_cmd->callback([&] {
        ProductDocument doc = load_product(refine_in);
        std::map<std::string, StateId> by_name;
        for (const auto& [q, name] : product_display_names(doc)) {
            by_name.emplace(name, q);
        }
        DeltaSet delta;
        for (const std::string& name : split_delta(refine_delta)) {
            auto it = by_name.find(name);
            if (it == by_name.end()) {
                throw std::runtime_error("--delta: unknown product state '" + name + "'");
            }
            delta.push_back(it->second);
        }
        std::sort(delta.begin(), delta.end());
        delta.erase(std::unique(delta.begin(), delta.end()), delta.end());
        ProductAutomaton refined = refine(doc.product, delta);
        write_text(serialize(ProductDocument{std::move(refined), doc.base_names}),
                   refine_out, out);
        result = kExitOk;
    });

    // ---- synthesize -------------------------------------------------------
    std::string synth_in;
    std::string synth_out;
    bool synth_fast = false;
    auto* synth_cmd = app.add_subcommand(
        "synthesize", "Synthesize the least-restrictive opacity-enforcing supervisor");
    synth_cmd->add_option("input", synth_in, "plant .desa file")->required();
    synth_cmd->add_flag("--fast", synth_fast, "use the state-at-a-time algorithm");
    synth_cmd->add_option("-o,--output", synth_out, "output file (default stdout)");
    synth_cmd->callback([&] {
        PlantDocument doc = load_plant(synth_in);
        Supervisor s =
            synth_fast ? synthesize_fast(doc.automaton) : synthesize(doc.automaton);
        if (s.is_null()) {
            err << "no opacity-enforcing supervisor exists\n";
            result = kExitNoSupervisor;
            return;
        }
        write_text(serialize(ProductDocument{std::move(s.realization), doc.state_names}),
                   synth_out, out);
        result = kExitOk;
    });

    // ---- verify-opacity ---------------------------------------------------
    std::string verify_in;
    auto* verify_cmd =
        app.add_subcommand("verify-opacity", "Check current-state opacity of a plant");
    verify_cmd->add_option("input", verify_in, "plant .desa file")->required();
    verify_cmd->callback([&] {
        bool opaque = verify_current_state_opacity(load_plant(verify_in).automaton);
        out << (opaque ? "opaque\n" : "not opaque\n");
        result = opaque ? kExitOk : kExitFalse;
    });

    // ---- check ------------------------------------------------------------
    auto* check_cmd = app.add_subcommand("check", "Structural relation and invariant checks");
    check_cmd->require_subcommand(1);

    std::string sub_a;
    std::string sub_b;
    auto* subaut_cmd = check_cmd->add_subcommand(
        "subautomaton", "Is A a subautomaton of B? (states matched by name)");
    subaut_cmd->add_option("A", sub_a, "candidate sub .desa file")->required();
    subaut_cmd->add_option("B", sub_b, "parent .desa file")->required();
    subaut_cmd->callback([&] {
        PlantDocument a = load_plant(sub_a);
        PlantDocument b = load_plant(sub_b);
        auto remapped = remap_by_names(a, b);
        bool holds = remapped && is_subautomaton(*remapped, b.automaton);
        out << (holds ? "holds\n" : "does not hold\n");
        result = holds ? kExitOk : kExitFalse;
    });

    std::string subobs_a;
    std::string subobs_b;
    auto* subobs_cmd = check_cmd->add_subcommand(
        "subobserver", "Is A's observer a subobserver of B's observer?");
    subobs_cmd->add_option("A", subobs_a, "candidate sub plant .desa file")->required();
    subobs_cmd->add_option("B", subobs_b, "parent plant .desa file")->required();
    subobs_cmd->callback([&] {
        PlantDocument a = load_plant(subobs_a);
        PlantDocument b = load_plant(subobs_b);
        auto remapped = remap_by_names(a, b);
        bool holds = remapped && is_subobserver(observe(*remapped), observe(b.automaton));
        out << (holds ? "holds\n" : "does not hold\n");
        result = holds ? kExitOk : kExitFalse;
    });

    std::string spa_in;
    auto* spa_cmd = check_cmd->add_subcommand(
        "spa", "Do the product's estimates partition its states? (composes internally)");
    spa_cmd->add_option("input", spa_in, "plant .desa file")->required();
    spa_cmd->callback([&] {
        PlantDocument doc = load_plant(spa_in);
        ProductAutomaton m = parallel_compose(doc.automaton, observe(doc.automaton));
        bool holds = check_spa(doc.automaton, m);
        out << (holds ? "holds\n" : "does not hold\n");
        result = holds ? kExitOk : kExitFalse;
    });

    std::string consist_in;
    auto* consist_cmd = check_cmd->add_subcommand(
        "consistency",
        "Does every product state carry exactly its plant state and estimate?");
    consist_cmd->add_option("input", consist_in, "plant .desa file")->required();
    consist_cmd->callback([&] {
        PlantDocument doc = load_plant(consist_in);
        ProductAutomaton m = parallel_compose(doc.automaton, observe(doc.automaton));
        bool holds =
            check_state_consistency(m, doc.automaton, 2 * m.graph().state_count());
        out << (holds ? "holds\n" : "does not hold\n");
        result = holds ? kExitOk : kExitFalse;
    });

    // ---- gen-random -------------------------------------------------------
    RandomConfig gen_cfg;
    std::uint64_t gen_seed = 0;
    std::size_t gen_states = 0;
    std::size_t gen_events = 3;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen-random", "Generate a deterministic random plant");
    gen_cmd->add_option("--seed", gen_seed, "rng seed")->required();
    gen_cmd->add_option("--states", gen_states, "state count before accessibility trim")
        ->required()
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
    gen_cmd->add_option("--events", gen_events, "event count")
        ->check(CLI::Range(std::size_t{1}, std::size_t{26}));
    gen_cmd->add_option("--density", gen_cfg.density, "P(transition) per state-event pair");
    gen_cmd->add_option("--p-ctrl", gen_cfg.p_controllable, "P(event controllable)");
    gen_cmd->add_option("--p-obs", gen_cfg.p_observable, "P(event adversary-observable)");
    gen_cmd->add_option("--p-marked", gen_cfg.p_marked, "P(state marked)");
    gen_cmd->add_option("-o,--output", gen_out, "output file (default stdout)");
    gen_cmd->callback([&] {
        gen_cfg.seed = gen_seed;
        gen_cfg.min_states = gen_cfg.max_states = gen_states;
        gen_cfg.min_events = gen_cfg.max_events = gen_events;
        write_text(serialize(plant_document(random_automaton(gen_cfg))), gen_out, out);
        result = kExitOk;
    });

    // ---- fuzz -------------------------------------------------------------
    std::size_t fuzz_runs = 0;
    std::uint64_t fuzz_seed = 1;
    std::size_t fuzz_max_states = 8;
    std::size_t fuzz_max_events = 4;
    auto* fuzz_cmd = app.add_subcommand(
        "fuzz", "Differential testing of refine/synthesize against the naive oracles");
    fuzz_cmd->add_option("--runs", fuzz_runs, "number of trials")->required();
    fuzz_cmd->add_option("--seed", fuzz_seed, "base seed (trial i uses seed+i)");
    fuzz_cmd->add_option("--max-states", fuzz_max_states, "max plant states per trial")
        ->check(CLI::Range(std::size_t{2}, std::size_t{64}));
    fuzz_cmd->add_option("--max-events", fuzz_max_events, "max events per trial")
        ->check(CLI::Range(std::size_t{1}, std::size_t{26}));
    fuzz_cmd->callback([&] {
        std::size_t failures = 0;
        for (std::size_t i = 0; i < fuzz_runs; ++i) {
            FuzzOutcome outcome =
                fuzz_trial(fuzz_seed + i, fuzz_max_states, fuzz_max_events);
            if (!outcome.ok) {
                ++failures;
                err << "fuzz failure (seed " << (fuzz_seed + i) << "): " << outcome.detail
                    << "\n";
            }
        }
        out << "fuzz: " << fuzz_runs << " runs, " << failures << " failures\n";
        result = failures == 0 ? kExitOk : kExitFalse;
    });

    // ---- bench ------------------------------------------------------------
    std::size_t bench_min = 100;
    std::size_t bench_max = 10000;
    std::size_t bench_trials = 3;
    auto* bench_cmd = app.add_subcommand(
        "bench", "CSV timings of incremental refine vs naive recomputation");
    bench_cmd->add_option("--min-states", bench_min, "smallest product size");
    bench_cmd->add_option("--max-states", bench_max, "largest product size");
    bench_cmd->add_option("--trials", bench_trials, "measurements per point (median)");
    bench_cmd->callback([&] { result = run_bench(bench_min, bench_max, bench_trials, out); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return result;
}

}  // namespace desup
