// The .desa text format: parsing, canonical serialization, round-trips,
// product documents, split-state name suffixes, and error diagnostics.

#include <string>
#include <variant>

#include "catch2/catch_amalgamated.hpp"
#include "desup/desa.hpp"
#include "desup/observer.hpp"
#include "desup/oracle.hpp"
#include "desup/refine.hpp"
#include "fixtures.hpp"

using namespace desup;
using namespace desup::testing;

using Catch::Matchers::ContainsSubstring;

namespace {

PlantDocument parse_plant(std::string_view text) {
    return std::get<PlantDocument>(parse_desa(text));
}

ProductDocument parse_product(std::string_view text) {
    return std::get<ProductDocument>(parse_desa(text));
}

}  // namespace

TEST_CASE("parse a plant document", "[desa]") {
    PlantDocument doc = load_fixture("f1.desa");
    Automaton expected = Builder{}
                             .event("a", true, true)
                             .event("u", false, false)
                             .states({0, 1, 2})
                             .initial(0)
                             .marked({2})
                             .trans(0, "u", 1)
                             .trans(0, "a", 2)
                             .trans(1, "a", 2)
                             .build();
    CHECK(doc.automaton == expected);
    CHECK(doc.state_names == std::vector<std::string>{"q0", "q1", "q2"});
    CHECK(doc.name_of(2) == "q2");
    CHECK_FALSE(is_product(DesaDocument{doc}));
}

TEST_CASE("state ids follow sorted name order, not declaration order",
          "[desa]") {
    PlantDocument doc = parse_plant(
        "event e ctrl obs\n"
        "state zz\n"
        "state aa marked\n"
        "initial zz\n"
        "trans zz e aa\n");
    CHECK(doc.state_names == std::vector<std::string>{"aa", "zz"});
    CHECK(doc.automaton.initial() == 1);  // zz
    CHECK(doc.automaton.marked() == std::vector<StateId>{0});
}

TEST_CASE("serialization is canonical", "[desa]") {
    // Same document, scrambled declaration order and noisy layout.
    std::string a =
        "event a ctrl obs\n"
        "event u unctrl unobs\n"
        "state q0\nstate q1\nstate q2 marked\n"
        "initial q0\n"
        "trans q0 u q1\ntrans q0 a q2\ntrans q1 a q2\n";
    std::string b =
        "# comment lines vanish\n"
        "trans q1 a q2\n"
        "state q2 marked\n"
        "event u unctrl unobs   # trailing comment\n"
        "\n"
        "trans q0 a q2\n"
        "state q1\n"
        "initial q0\n"
        "event a ctrl obs\n"
        "trans q0 u q1\n"
        "state q0\n";
    CHECK(serialize(parse_desa(a)) == serialize(parse_desa(b)));
}

TEST_CASE("fixture round-trips are stable", "[desa]") {
    for (const char* name :
         {"f1.desa", "f2.desa", "f3.desa", "f4.desa", "two_stage.desa",
          "counting.desa", "unenforceable.desa"}) {
        INFO(name);
        DesaDocument doc = parse_desa_file(fixture_path(name));
        std::string once = serialize(doc);
        DesaDocument again = parse_desa(once);
        REQUIRE(serialize(again) == once);
        REQUIRE(std::get<PlantDocument>(again).automaton ==
                std::get<PlantDocument>(doc).automaton);
    }
}

TEST_CASE("generated plants round-trip bit-exactly", "[desa]") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RandomConfig cfg;
        cfg.seed = seed;
        PlantDocument doc = plant_document(random_automaton(cfg));
        std::string text = serialize(doc);
        PlantDocument back = parse_plant(text);
        REQUIRE(back.automaton == doc.automaton);
        REQUIRE(serialize(back) == text);
    }
}

TEST_CASE("a document with events but no states is the null automaton",
          "[desa]") {
    PlantDocument doc = parse_plant("event a ctrl obs\n");
    CHECK(doc.automaton.is_null());
    // And it serializes back to just the event block.
    std::string text = serialize(doc);
    CHECK(text == "event a ctrl obs\n");
    CHECK(parse_plant(text).automaton.is_null());
}

TEST_CASE("plant_document wraps and renumbers", "[desa]") {
    Automaton g = Builder{}
                      .event("e", true, true)
                      .states({0, 1})
                      .initial(0)
                      .marked({1})
                      .trans(0, "e", 1)
                      .build();

    SECTION("generated names preserve id order") {
        PlantDocument doc = plant_document(g);
        CHECK(doc.state_names == std::vector<std::string>{"s0", "s1"});
        CHECK(doc.automaton == g);
    }
    SECTION("custom names renumber into sorted order") {
        // State 0 is named "z", state 1 "a": after renumbering, "a" is id 0.
        PlantDocument doc = plant_document(g, {"z", "a"});
        CHECK(doc.state_names == std::vector<std::string>{"a", "z"});
        CHECK(doc.automaton.initial() == 1);
        CHECK(doc.automaton.marked() == std::vector<StateId>{0});
        CHECK(doc.automaton.transitions() ==
              std::vector<Transition>{{1, 0, 0}});
    }
    SECTION("bad names are rejected") {
        CHECK_THROWS_AS(plant_document(g, {"x", "x"}), std::invalid_argument);
        CHECK_THROWS_AS(plant_document(g, {"", "y"}), std::invalid_argument);
        CHECK_THROWS_AS(plant_document(g, {"a|b", "y"}), std::invalid_argument);
    }
}

TEST_CASE("product documents round-trip", "[desa]") {
    PlantDocument plant = load_fixture("f1.desa");
    ProductAutomaton m =
        parallel_compose(plant.automaton, observe(plant.automaton));
    ProductDocument doc{m, plant.state_names};

    std::string text = serialize(doc);
    CHECK_THAT(text, ContainsSubstring("state q0|q0,q1"));
    CHECK_THAT(text, ContainsSubstring("state q2|q2 marked"));

    DesaDocument back = parse_desa(text);
    REQUIRE(is_product(back));
    const ProductDocument& parsed = std::get<ProductDocument>(back);
    CHECK(canonically_equal(parsed.product, m));
    CHECK(serialize(parsed) == text);
}

TEST_CASE("split payloads serialize with ~k suffixes and round-trip",
          "[desa]") {
    Automaton g = split_plant();
    ProductAutomaton m = parallel_compose(g, observe(g));
    ProductAutomaton r = refine(m, split_delta());
    ProductDocument doc{r, {"s0", "s1", "s2", "s3", "s4"}};

    // Ascending-id tie break: ids 1 and 5 share "s4|s0,s4"; 5 gets the ~2.
    auto names = product_display_names(doc);
    CHECK(names.at(1) == "s4|s0,s4");
    CHECK(names.at(5) == "s4|s0,s4~2");
    CHECK(names.at(3) == "s0|s0,s4");
    CHECK(names.at(9) == "s0|s0,s4~2");
    CHECK(product_state_name(doc, 1) == product_state_name(doc, 5));

    std::string text = serialize(doc);
    CHECK_THAT(text, ContainsSubstring("s4|s0,s4~2"));

    // Parsed documents renumber plant ids over the base names that actually
    // occur ({s0, s1, s4} here), so compare the documents rather than the
    // payload vectors.
    const ProductDocument parsed = parse_product(text);
    CHECK(parsed.base_names == std::vector<std::string>{"s0", "s1", "s4"});
    CHECK(parsed.product.graph().state_count() == r.graph().state_count());
    CHECK(parsed.product.graph().transitions().size() ==
          r.graph().transitions().size());
    CHECK(parsed.product.estimate_table().size() == r.estimate_table().size());
    CHECK(serialize(parsed) == text);
}

TEST_CASE("parse errors carry locations", "[desa]") {
    SECTION("nondeterminism") {
        try {
            parse_desa(
                "event a ctrl obs\nstate x\nstate y\ninitial x\n"
                "trans x a y\ntrans x a x\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 6);
            CHECK_THAT(e.what(), ContainsSubstring("line 6"));
        }
    }
    SECTION("unknown initial state") {
        CHECK_THROWS_AS(parse_desa("event a ctrl obs\nstate x\ninitial q\n"),
                        ParseError);
    }
    SECTION("states but no initial line") {
        CHECK_THROWS_AS(parse_desa("event a ctrl obs\nstate x\n"), ParseError);
    }
    SECTION("transition over an undeclared event") {
        CHECK_THROWS_AS(
            parse_desa("event a ctrl obs\nstate x\ninitial x\ntrans x b x\n"),
            ParseError);
    }
    SECTION("transition endpoint never declared") {
        CHECK_THROWS_AS(
            parse_desa("event a ctrl obs\nstate x\ninitial x\ntrans x a y\n"),
            ParseError);
    }
    SECTION("duplicate declarations") {
        CHECK_THROWS_AS(parse_desa("event a ctrl obs\nevent a ctrl obs\n"),
                        ParseError);
        CHECK_THROWS_AS(
            parse_desa("event a ctrl obs\nstate x\nstate x\ninitial x\n"),
            ParseError);
    }
    SECTION("malformed keywords and arity") {
        CHECK_THROWS_AS(parse_desa("event a maybe obs\n"), ParseError);
        CHECK_THROWS_AS(parse_desa("event a ctrl\n"), ParseError);
        CHECK_THROWS_AS(parse_desa("banana\n"), ParseError);
    }
    SECTION("mixing plain and composite state names") {
        CHECK_THROWS_AS(parse_desa("event a ctrl obs\n"
                                   "state q0|q0\nstate q1\n"
                                   "initial q0|q0\n"),
                        ParseError);
    }
    SECTION("broken ~ suffix") {
        CHECK_THROWS_AS(parse_desa("event a ctrl obs\n"
                                   "state q0|q0~x\n"
                                   "initial q0|q0~x\n"),
                        ParseError);
    }
    SECTION("two bars in a composite name") {
        CHECK_THROWS_AS(parse_desa("event a ctrl obs\n"
                                   "state q0|q0|q1\n"
                                   "initial q0|q0|q1\n"),
                        ParseError);
    }
}

TEST_CASE("parse_desa_file reports missing files", "[desa]") {
    CHECK_THROWS_AS(parse_desa_file("/nonexistent/nope.desa"),
                    std::runtime_error);
}
