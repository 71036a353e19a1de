#include <doctest.h>

#include <functional>
#include <random>

#include "eventcast/embedding.hpp"
#include "helpers.hpp"

using namespace eventcast;
using testutil::LetterAlphabet;

namespace {

std::vector<int> letters(const std::string& s) {
    std::vector<int> out;
    for (char c : s) out.push_back(c - 'a');
    return out;
}

// a quick random suffix automaton: learn from a sticky random stream
Psa random_psa(std::mt19937_64& rng, int alphabet, int order) {
    std::vector<int> S(20000);
    int current = 0;
    for (auto& s : S) {
        if (rng() % 10 < 6) current = static_cast<int>(rng() % static_cast<unsigned>(alphabet));
        s = current;
    }
    LearnConfig cfg;
    cfg.m = order;
    const auto cst = cst_build(S, cfg.m + 1, alphabet);
    return pst_to_psa(learn_pst(cst, cfg), &cst);
}

}  // namespace

TEST_CASE("the worked product has exactly the six accessible states") {
    LetterAlphabet ab(2);
    const Dsfa dsfa = testutil::example_ab_dsfa(ab);
    REQUIRE(dsfa.num_states == 3);
    const auto psa = pst_to_psa(testutil::example_pst());
    const auto emb = embed(dsfa, psa);

    // full product would be 9; the three pairs without incoming transitions
    // never materialize
    CHECK(emb.num_states() == 6);

    const int s0 = dsfa.start;
    const int s1 = dsfa.next(s0, 0);
    const int s2 = dsfa.next(s1, 1);
    const int aa = psa.state_of_label(letters("aa"));
    const int ba = psa.state_of_label(letters("ba"));
    const int b = psa.state_of_label(letters("b"));

    CHECK(emb.state_of(s0, aa) >= 0);
    CHECK(emb.state_of(s0, ba) >= 0);
    CHECK(emb.state_of(s0, b) >= 0);
    CHECK(emb.state_of(s1, aa) >= 0);
    CHECK(emb.state_of(s1, ba) >= 0);
    CHECK(emb.state_of(s2, b) >= 0);
    // the inaccessible pairs are absent
    CHECK(emb.state_of(s1, b) < 0);
    CHECK(emb.state_of(s2, aa) < 0);
    CHECK(emb.state_of(s2, ba) < 0);

    // final iff the automaton component is final
    for (int q = 0; q < emb.num_states(); ++q)
        CHECK(emb.is_final(q) == dsfa.is_final(emb.dsfa_state(q)));

    // every state is a start or has an incoming transition
    std::vector<char> incoming(static_cast<size_t>(emb.num_states()), 0);
    for (int q = 0; q < emb.num_states(); ++q)
        for (int s = 0; s < emb.alphabet_size; ++s)
            incoming[static_cast<size_t>(emb.next(q, s))] = 1;
    for (int start : emb.starts) incoming[static_cast<size_t>(start)] = 1;
    for (char flag : incoming) CHECK(flag == 1);
}

TEST_CASE("a single-state model embeds isomorphically to the automaton") {
    LetterAlphabet ab(2);
    const Dsfa dsfa = testutil::example_ab_dsfa(ab);
    PredictionSuffixTree root_only(2, 1);
    root_only.set_distribution(0, {0.6, 0.4});
    root_only.set_count(0, 10);
    const auto psa = pst_to_psa(root_only);
    const auto emb = embed(dsfa, psa);
    CHECK(emb.num_states() == dsfa.num_states);
    for (int q = 0; q < emb.num_states(); ++q) {
        CHECK(emb.prob(q, 0) == 0.6);
        CHECK(emb.prob(q, 1) == 0.4);
    }
}

TEST_CASE("transition probability rows sum to one") {
    std::mt19937_64 rng(53);
    LetterAlphabet abc(3);
    const Sre r = to_streaming(
        sre_concat(abc.letter_sre('a'), sre_concat(abc.letter_sre('c'), abc.letter_sre('c'))));
    const Dsfa dsfa = determinize(compile_sfa(r), abc.minterms);
    const auto psa = random_psa(rng, 3, 2);
    const auto emb = embed(dsfa, psa);
    for (int q = 0; q < emb.num_states(); ++q) {
        double row = 0.0;
        for (int s = 0; s < emb.alphabet_size; ++s) row += emb.prob(q, s);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(emb.num_states() <= dsfa.num_states * psa.num_states());
}

TEST_CASE("language agreement with the automaton, exhaustively to length 6") {
    std::mt19937_64 rng(59);
    LetterAlphabet ab(2);
    const std::vector<Sre> patterns = {
        sre_concat(ab.letter_sre('a'), ab.letter_sre('b')),
        sre_concat(ab.letter_sre('a'),
                   sre_concat(sre_star(ab.letter_sre('b')), ab.letter_sre('a'))),
    };
    for (const auto& r : patterns) {
        const Dsfa dsfa = determinize(compile_sfa(to_streaming(r)), ab.minterms);
        const auto psa = random_psa(rng, 2, 2);
        const auto emb = embed(dsfa, psa);

        std::vector<int> word;
        std::function<void()> explore = [&] {
            CHECK(embedding_accepts(emb, word) == dsfa.is_final(dsfa.run_word(word)));
            if (word.size() == 6) return;
            for (int s = 0; s < 2; ++s) {
                word.push_back(s);
                explore();
                word.pop_back();
            }
        };
        explore();
    }
}

TEST_CASE("string probabilities match an independent automaton walker") {
    std::mt19937_64 rng(61);
    LetterAlphabet ab(2);
    const Dsfa dsfa = testutil::example_ab_dsfa(ab);
    const auto psa = pst_to_psa(testutil::example_pst());
    const auto emb = embed(dsfa, psa);

    std::uniform_int_distribution<int> sym(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<int> word(2 + rng() % 8);
        for (auto& s : word) s = sym(rng);
        const auto expected = psa_probability(psa, word);
        const auto actual = string_probability(emb, word);
        REQUIRE(expected.has_value() == actual.has_value());
        if (expected)
            CHECK(*actual == doctest::Approx(*expected).epsilon(1e-12));
    }

    // a word consisting of one whole label has probability pi(start)
    const int aa = psa.state_of_label(letters("aa"));
    CHECK(*string_probability(emb, letters("aa")) == psa.pi[static_cast<size_t>(aa)]);
    // shorter than every label: no start resolves
    CHECK_FALSE(string_probability(emb, letters("a")).has_value());
}

TEST_CASE("partitioned matrix is row stochastic with the block layout") {
    LetterAlphabet ab(2);
    const Dsfa dsfa = testutil::example_ab_dsfa(ab);
    const auto psa = pst_to_psa(testutil::example_pst());
    const auto emb = embed(dsfa, psa);
    const auto pm = partition_matrix(emb);

    CHECK(pm.size() == emb.num_states());
    CHECK(pm.num_final == 1);  // only (final, b) is accessible
    CHECK(pm.num_non_final == 5);

    for (int row = 0; row < pm.size(); ++row) {
        double sum = 0.0;
        for (int col = 0; col < pm.size(); ++col) sum += pm.at(row, col);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // non-finals occupy the leading rows
    for (int q = 0; q < emb.num_states(); ++q) {
        const int row = pm.matrix_index[static_cast<size_t>(q)];
        CHECK((row < pm.num_non_final) == !emb.is_final(q));
    }
}

TEST_CASE("parallel symbol edges merge by summation") {
    // two symbols from the same source into the same target: build a psa over
    // a 2-letter alphabet whose both symbols keep the automaton in place
    LetterAlphabet ab(2);
    const Sre r = to_streaming(sre_concat(ab.letter_sre('a'), ab.letter_sre('b')));
    const Dsfa dsfa = determinize(compile_sfa(r), ab.minterms);
    PredictionSuffixTree root_only(2, 1);
    root_only.set_distribution(0, {0.3, 0.7});
    root_only.set_count(0, 1);
    const auto psa = pst_to_psa(root_only);
    const auto emb = embed(dsfa, psa);
    const auto pm = partition_matrix(emb);

    // from the final state, symbol a goes to state 1 and symbol b to state 0;
    // from state 0, a loops nowhere else: check one merged entry explicitly
    const int s0 = dsfa.start;
    const int emb0 = emb.state_of(s0, 0);
    REQUIRE(emb0 >= 0);
    // state 0 on b stays in state 0: entry (0,0) accumulates just that edge
    const int row = pm.matrix_index[static_cast<size_t>(emb0)];
    CHECK(pm.at(row, row) == doctest::Approx(0.7));
}
