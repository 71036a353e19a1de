#include <doctest.h>

#include <random>

#include "eventcast/algebra.hpp"
#include "helpers.hpp"

using namespace eventcast;
using testutil::make_event;
using testutil::speed_minterms;

TEST_CASE("predicate evaluation on events") {
    const Predicate lt5 = parse_predicate("speed < 5");
    CHECK(eval_predicate(lt5, make_event(2)));
    CHECK_FALSE(eval_predicate(lt5, make_event(22)));

    CHECK(eval_predicate(pred_true(), make_event(2)));
    CHECK(eval_predicate(pred_true(), make_event(1e9)));

    const Predicate unsat = pred_and(parse_predicate("speed < 5"), parse_predicate("speed > 20"));
    CHECK_FALSE(eval_predicate(unsat, make_event(2)));
    CHECK_FALSE(satisfiable_conjunction({{unsat, true}}));
}

TEST_CASE("predicate evaluation errors") {
    const Predicate lt5 = parse_predicate("speed < 5");
    Event e;
    e.timestamp = 1;
    e.partition = "v1";
    CHECK_THROWS_AS(eval_predicate(lt5, e), Error);  // missing attribute

    e.attributes["speed"] = std::string("fast");
    CHECK_THROWS_AS(eval_predicate(lt5, e), Error);  // type mismatch
}

TEST_CASE("predicate parser handles comparisons, strings and connectives") {
    CHECK(eval_predicate(parse_predicate("country = 'MA'"),
                         [] {
                             Event e;
                             e.attributes["country"] = std::string("MA");
                             return e;
                         }()));
    const Predicate p = parse_predicate("speed >= 5 & !(speed > 20) | status != 'fishing'");
    Event e;
    e.attributes["speed"] = 10.0;
    e.attributes["status"] = std::string("fishing");
    CHECK(eval_predicate(p, e));
    CHECK_THROWS_AS(parse_predicate("speed <"), Error);
    CHECK_THROWS_AS(parse_predicate("unknownName"), Error);
}

TEST_CASE("simplified minterms drop assignments refuted by an exclusion group") {
    const MintermSet ms = speed_minterms();
    REQUIRE(ms.size() == 3);
    // positive member entails the negation of the other one
    CHECK(ms.minterm(0).description() == "speed < 5");
    CHECK(ms.minterm(1).description() == "speed > 20");
    CHECK(ms.minterm(2).description() == "!(speed < 5) & !(speed > 20)");
}

TEST_CASE("minterms without exclusions enumerate every sign assignment") {
    std::vector<Predicate> one = {parse_predicate("x > 0")};
    CHECK(build_minterms(one).size() == 2);

    std::vector<Predicate> two = {parse_predicate("x > 0"), parse_predicate("y > 0")};
    const MintermSet ms = build_minterms(two);
    REQUIRE(ms.size() == 4);
    CHECK(ms.minterm(0).description() == "x > 0 & y > 0");
    CHECK(ms.minterm(1).description() == "x > 0 & !(y > 0)");
    CHECK(ms.minterm(2).description() == "!(x > 0) & y > 0");
    CHECK(ms.minterm(3).description() == "!(x > 0) & !(y > 0)");
}

TEST_CASE("duplicate predicates collapse before enumeration") {
    std::vector<Predicate> preds = {parse_predicate("d > 0"), parse_predicate("d > 0"),
                                    parse_predicate("d > 100")};
    CHECK(build_minterms(preds).size() == 4);
}

TEST_CASE("inconsistent exclusions are rejected") {
    std::vector<Predicate> preds = {parse_predicate("x > 0")};
    // a group with the same predicate twice refutes both assignments
    CHECK_THROWS_AS(build_minterms(preds, {{0, 0}}), Error);
}

TEST_CASE("classification matches the worked speed examples") {
    const MintermSet ms = speed_minterms();
    CHECK(classify_event(ms, make_event(2)) == 0);    // speed < 5
    CHECK(classify_event(ms, make_event(10)) == 2);   // between 5 and 20
    CHECK(classify_event(ms, make_event(22)) == 1);   // speed > 20
}

TEST_CASE("classification is exhaustive and exclusive on random events") {
    const MintermSet simplified = speed_minterms(true);
    const MintermSet full = speed_minterms(false);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> speed(-10.0, 40.0);
    for (int i = 0; i < 10000; ++i) {
        const Event e = make_event(speed(rng));
        const auto symbol = simplified.classify(e);
        REQUIRE(symbol.has_value());
        // exactly one simplified minterm evaluates true
        int truths = 0;
        for (const auto& m : simplified.minterms()) {
            bool all = true;
            for (const auto& [p, pol] : m.conjuncts) {
                if (eval_predicate(p, e) != pol) {
                    all = false;
                    break;
                }
            }
            if (all) ++truths;
        }
        CHECK(truths == 1);
        // the simplified and the unsimplified sets agree on the class
        const auto full_symbol = full.classify(e);
        REQUIRE(full_symbol.has_value());
        for (int pi = 0; pi < 2; ++pi)
            CHECK(simplified.polarity(*symbol, pi) == full.polarity(*full_symbol, pi));
    }
}

TEST_CASE("events violating a declared exclusion are reported as no-match") {
    // exclusion declared over predicates that are not actually exclusive
    std::vector<Predicate> preds = {parse_predicate("x > 0"), parse_predicate("x > 10")};
    const MintermSet ms = build_minterms(preds, {{0, 1}});
    Event e;
    e.attributes["x"] = 20.0;  // both hold, assignment was refuted
    CHECK_FALSE(ms.classify(e).has_value());
}

TEST_CASE("minterm construction is deterministic") {
    const MintermSet a = speed_minterms();
    const MintermSet b = speed_minterms();
    REQUIRE(a.size() == b.size());
    for (int i = 0; i < a.size(); ++i)
        CHECK(a.minterm(i).description() == b.minterm(i).description());
}

TEST_CASE("interval reasoning spots unsatisfiable conjunctions") {
    const Predicate d0 = parse_predicate("d > 0");
    const Predicate d100 = parse_predicate("d > 100");
    CHECK(satisfiable_conjunction({{d0, true}, {d100, true}}));
    CHECK(satisfiable_conjunction({{d0, true}, {d100, false}}));
    CHECK_FALSE(satisfiable_conjunction({{d0, false}, {d100, true}}));  // d <= 0 and d > 100
    CHECK(satisfiable_conjunction({{d0, false}, {d100, false}}));
    CHECK_FALSE(satisfiable_conjunction({{pred_false(), true}}));
    CHECK_FALSE(satisfiable_conjunction({{pred_true(), false}}));
}

TEST_CASE("external predicates evaluate through the registered function") {
    const Predicate inside = pred_external(
        "InsidePort", inside_radius_predicate(48.38, -4.49, 5.0));
    Event near_port;
    near_port.attributes["lat"] = 48.39;
    near_port.attributes["lon"] = -4.48;
    Event far;
    far.attributes["lat"] = 49.5;
    far.attributes["lon"] = -3.0;
    CHECK(eval_predicate(inside, near_port));
    CHECK_FALSE(eval_predicate(inside, far));
    CHECK(haversine_km(0, 0, 0, 0) == doctest::Approx(0.0));
    CHECK(haversine_km(48.0, -4.0, 48.0, -3.0) == doctest::Approx(74.6).epsilon(0.01));
}
