#include <doctest.h>

#include <random>

#include "eventcast/model_io.hpp"
#include "eventcast/psa.hpp"
#include "helpers.hpp"

using namespace eventcast;

namespace {

std::vector<int> letters(const std::string& s) {
    std::vector<int> out;
    for (char c : s) out.push_back(c - 'a');
    return out;
}

}  // namespace

TEST_CASE("the example tree converts to the three-state suffix automaton") {
    const auto psa = pst_to_psa(testutil::example_pst());
    validate_psa(psa);
    REQUIRE(psa.num_states() == 3);

    const int aa = psa.state_of_label(letters("aa"));
    const int ba = psa.state_of_label(letters("ba"));
    const int b = psa.state_of_label(letters("b"));
    REQUIRE(aa >= 0);
    REQUIRE(ba >= 0);
    REQUIRE(b >= 0);

    // six labeled transitions with the worked probabilities
    CHECK(psa.next(aa, 0) == aa);
    CHECK(psa.prob(aa, 0) == 0.75);
    CHECK(psa.next(aa, 1) == b);
    CHECK(psa.prob(aa, 1) == 0.25);
    CHECK(psa.next(ba, 0) == aa);
    CHECK(psa.prob(ba, 0) == 0.1);
    CHECK(psa.next(ba, 1) == b);
    CHECK(psa.prob(ba, 1) == 0.9);
    CHECK(psa.next(b, 0) == ba);
    CHECK(psa.prob(b, 0) == 0.5);
    CHECK(psa.next(b, 1) == b);
    CHECK(psa.prob(b, 1) == 0.5);
}

TEST_CASE("a root-only tree becomes the single-state i.i.d. automaton") {
    PredictionSuffixTree root_only(3, 1);
    root_only.set_distribution(0, {0.2, 0.3, 0.5});
    root_only.set_count(0, 100);
    const auto psa = pst_to_psa(root_only);
    validate_psa(psa);
    REQUIRE(psa.num_states() == 1);
    CHECK(psa.labels[0].empty());
    for (int sigma = 0; sigma < 3; ++sigma) CHECK(psa.next(0, sigma) == 0);
    CHECK(psa.prob(0, 2) == 0.5);
    CHECK(psa.pi[0] == 1.0);
}

TEST_CASE("unexpanded nodes are materialized before conversion") {
    // tree with contexts a, b, aa, ba, aba, bba: leaf b cannot answer tau(b, a)
    // because node ba is internal, so b's children must be created first
    PredictionSuffixTree pst(2, 3);
    pst.set_distribution(0, {0.5, 0.5});
    pst.set_count(0, 64);
    const auto set = [&](const std::string& ctx, std::vector<double> gamma, std::int64_t count) {
        const int node = pst.ensure_node(letters(ctx));
        pst.set_distribution(node, std::move(gamma));
        pst.set_count(node, count);
    };
    set("a", {0.7, 0.3}, 32);
    set("b", {0.5, 0.5}, 32);
    set("aa", {0.75, 0.25}, 16);
    set("ba", {0.1, 0.9}, 16);
    set("aba", {0.9, 0.1}, 8);
    set("bba", {0.1, 0.9}, 8);

    const auto psa = pst_to_psa(pst);
    validate_psa(psa);
    REQUIRE(psa.num_states() == 5);
    CHECK(psa.state_of_label(letters("aa")) >= 0);
    CHECK(psa.state_of_label(letters("aba")) >= 0);
    CHECK(psa.state_of_label(letters("bba")) >= 0);
    CHECK(psa.state_of_label(letters("ab")) >= 0);  // materialized
    CHECK(psa.state_of_label(letters("bb")) >= 0);  // materialized
    CHECK(psa.state_of_label(letters("b")) < 0);    // expanded away

    // the materialized children carry the unexpanded parent's distribution
    const int ab = psa.state_of_label(letters("ab"));
    CHECK(psa.prob(ab, 0) == 0.5);
    // and their transitions resolve through the deep leaves
    CHECK(psa.next(ab, 0) == psa.state_of_label(letters("aba")));
    CHECK(psa.next(ab, 1) == psa.state_of_label(letters("bb")));
}

TEST_CASE("learned automata are structurally well-formed") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const int alphabet = 2 + static_cast<int>(rng() % 2);
        std::vector<int> S(20000);
        // a sticky source so deeper contexts get retained
        int current = 0;
        for (auto& s : S) {
            if (rng() % 10 < 7) current = static_cast<int>(rng() % static_cast<unsigned>(alphabet));
            s = current;
        }
        LearnConfig cfg;
        cfg.m = 3;
        const auto cst = cst_build(S, cfg.m + 1, alphabet);
        const auto pst = learn_pst(cst, cfg);
        const auto psa = pst_to_psa(pst, &cst);
        validate_psa(psa);  // suffix-freeness, tau condition, stochastic rows

        double pi_sum = 0.0;
        for (double p : psa.pi) pi_sum += p;
        CHECK(pi_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("initial distribution follows the empirical label frequencies") {
    std::vector<int> S;
    std::mt19937_64 rng(47);
    for (int i = 0; i < 5000; ++i) S.push_back(static_cast<int>(rng() % 2));
    LearnConfig cfg;
    cfg.m = 2;
    cfg.full_expansion = true;
    const auto cst = cst_build(S, cfg.m + 1, 2);
    const auto pst = learn_pst(cst, cfg);
    const auto psa = pst_to_psa(pst, &cst);
    validate_psa(psa);

    // full expansion: states are the four depth-2 contexts; pi must match the
    // window counts
    REQUIRE(psa.num_states() == 4);
    std::int64_t total = 0;
    for (int q = 0; q < psa.num_states(); ++q) total += cst.count(psa.labels[static_cast<size_t>(q)]);
    for (int q = 0; q < psa.num_states(); ++q) {
        const double expected =
            static_cast<double>(cst.count(psa.labels[static_cast<size_t>(q)])) /
            static_cast<double>(total);
        CHECK(psa.pi[static_cast<size_t>(q)] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("state budget limits the closure expansion") {
    const auto pst = testutil::example_pst();
    CHECK_THROWS_AS(pst_to_psa(pst, nullptr, 2), Error);
}

TEST_CASE("automaton probability multiplies pi and the per-symbol gammas") {
    const auto psa = pst_to_psa(testutil::example_pst());
    const int aa = psa.state_of_label(letters("aa"));
    const double pi_aa = psa.pi[static_cast<size_t>(aa)];

    // word aa then b: start matches label aa, one 0.25 edge follows
    const auto p = psa_probability(psa, letters("aab"));
    REQUIRE(p.has_value());
    CHECK(*p == doctest::Approx(pi_aa * 0.25).epsilon(1e-15));

    // no prefix equal to any label
    CHECK_FALSE(psa_probability(psa, letters("a")).has_value());
}

TEST_CASE("model JSON round-trips bit-exactly") {
    const auto pst = testutil::example_pst();
    const auto psa = pst_to_psa(pst);
    const MintermSet ms = testutil::LetterAlphabet(2).minterms;

    const std::string json = model_to_json(pst, ms, &psa);
    const LoadedModel loaded = model_from_json(json);
    CHECK(loaded.order == pst.max_depth());
    REQUIRE(loaded.pst.node_count() == pst.node_count());
    for (int node = 0; node < pst.node_count(); ++node) {
        const int mirror = loaded.pst.lookup(pst.label(node));
        REQUIRE(loaded.pst.node_depth(mirror) == pst.node_depth(node));
        const auto& original = pst.distribution(node);
        const auto& round_tripped = loaded.pst.distribution(mirror);
        for (size_t i = 0; i < original.size(); ++i) CHECK(original[i] == round_tripped[i]);
    }
    REQUIRE(loaded.psa.has_value());
    CHECK(loaded.psa->gamma == psa.gamma);
    CHECK(loaded.psa->pi == psa.pi);
    CHECK(loaded.psa->tau == psa.tau);
    CHECK(loaded.psa->labels == psa.labels);

    // a second round trip is byte-identical
    CHECK(model_to_json(loaded.pst, ms, &*loaded.psa) == json);
}
