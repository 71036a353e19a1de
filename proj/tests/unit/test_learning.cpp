#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "eventcast/learning.hpp"
#include "helpers.hpp"

using namespace eventcast;

namespace {

std::vector<int> letters(const std::string& s) {
    std::vector<int> out;
    for (char c : s) out.push_back(c - 'a');
    return out;
}

// occurrences of `needle` ending at 1-based positions [from, to] of S
std::int64_t naive_count(const std::vector<int>& S, const std::vector<int>& needle,
                         std::int64_t from, std::int64_t to) {
    std::int64_t count = 0;
    for (std::int64_t end = from; end <= to; ++end) {
        if (end < static_cast<std::int64_t>(needle.size())) continue;
        if (end > static_cast<std::int64_t>(S.size())) break;
        bool match = true;
        for (size_t i = 0; i < needle.size(); ++i) {
            if (S[static_cast<size_t>(end) - needle.size() + i] != needle[i]) {
                match = false;
                break;
            }
        }
        if (match) ++count;
    }
    return count;
}

// the empirical conditional from the counting formulas, by direct scan:
// numerator counts s.sigma ending at [m+1, k], denominator s ending at [m, k-1]
double eq8_conditional(const std::vector<int>& S, const std::vector<int>& s, int sigma, int m) {
    std::vector<int> extended = s;
    extended.push_back(sigma);
    const std::int64_t k = static_cast<std::int64_t>(S.size());
    const std::int64_t num = naive_count(S, extended, m + 1, k);
    const std::int64_t den = naive_count(S, s, m, k - 1);
    if (den == 0) return -1.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<int> planted_order2_stream(size_t n, std::uint64_t seed) {
    // next-symbol probability depends on the two preceding symbols
    const std::map<std::pair<int, int>, double> p0 = {
        {{0, 0}, 0.2}, {{0, 1}, 0.9}, {{1, 0}, 0.8}, {{1, 1}, 0.1}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<int> out = {0, 1};
    out.reserve(n);
    while (out.size() < n) {
        const auto key = std::make_pair(out[out.size() - 2], out.back());
        out.push_back(u(rng) < p0.at(key) ? 0 : 1);
    }
    return out;
}

}  // namespace

TEST_CASE("counter suffix tree reproduces the worked counts") {
    const auto S = letters("aaabaabaaa");
    const auto cst = cst_build(S, 2, 2);
    CHECK(cst.count(letters("a")) == 7);
    CHECK(cst.count(letters("b")) == 2);
    CHECK(cst.count(letters("ba")) == 2);  // path a then b from the root
    CHECK(cst.count(letters("aa")) == 5);
    CHECK(cst.count(letters("ab")) == 2);
    CHECK(cst.total_windows() == 9);
}

TEST_CASE("counter suffix tree counts equal naive window scans") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int alphabet = 2 + static_cast<int>(rng() % 3);  // up to 4 symbols
        const int m = 1 + static_cast<int>(rng() % 4);
        const size_t length = static_cast<size_t>(m) + 1 + rng() % 200;
        std::vector<int> S(length);
        for (auto& s : S) s = static_cast<int>(rng() % static_cast<unsigned>(alphabet));

        const auto cst = cst_build(S, m, alphabet);
        const std::int64_t k = static_cast<std::int64_t>(S.size());

        std::vector<int> needle;
        std::function<void()> check = [&] {
            if (!needle.empty()) CHECK(cst.count(needle) == naive_count(S, needle, m, k));
            if (static_cast<int>(needle.size()) == m) return;
            for (int s = 0; s < alphabet; ++s) {
                needle.push_back(s);
                check();
                needle.pop_back();
            }
        };
        check();
    }
}

TEST_CASE("level sums are conserved across depths") {
    std::mt19937_64 rng(13);
    std::vector<int> S(500);
    for (auto& s : S) s = static_cast<int>(rng() % 3);
    const auto cst = cst_build(S, 4, 3);
    const std::int64_t windows = cst.total_windows();
    for (int level = 1; level <= 4; ++level) CHECK(cst.level_sum(level) == windows);
}

TEST_CASE("multi-sequence accumulation never spans partition boundaries") {
    CounterSuffixTree cst(2, 2);
    cst.add_sequence(letters("ab"));
    cst.add_sequence(letters("ba"));
    CHECK(cst.count(letters("ab")) == 1);
    CHECK(cst.count(letters("ba")) == 1);
    CHECK(cst.count(letters("aa")) == 0);
    CHECK(cst.total_windows() == 2);
}

TEST_CASE("empirical conditionals follow the counting formulas") {
    const auto S = letters("aaabaabaaa");
    // order 2 means windows of length 3
    const auto cst = cst_build(S, 3, 2);
    CHECK(empirical_prob(cst, letters("a"), 0) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    CHECK(empirical_prob(cst, letters("a"), 1) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(eq8_conditional(S, letters("a"), 0, 2) == doctest::Approx(4.0 / 6.0));

    // never-observed context falls back to uniform
    CHECK(empirical_prob(cst, letters("bb"), 0) == doctest::Approx(0.5));

    double sum = 0.0;
    for (int sigma = 0; sigma < 2; ++sigma) sum += empirical_prob(cst, letters("a"), sigma);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the ratio test fires exactly when the conditional moves enough") {
    // the worked check: P(a|ba)=0.1 against P(a|a)=0.7 gives 0.14, well
    // outside the 1/1.05 band
    const std::vector<double> dist = {0.1, 0.9};
    const std::vector<double> parent = {0.7, 0.3};
    CHECK(expansion_worthwhile(dist, parent, 0.001, 1.05));
    const std::vector<double> same = {0.5, 0.5};
    CHECK_FALSE(expansion_worthwhile(same, same, 0.001, 1.05));
    // frequency gate: theta1 above the conditional suppresses the expansion
    CHECK_FALSE(expansion_worthwhile(dist, parent, 0.95, 1.05));
}

TEST_CASE("full expansion reproduces the empirical conditionals exactly") {
    std::mt19937_64 rng(17);
    std::vector<int> S(10000);
    for (auto& s : S) s = static_cast<int>(rng() % 2);

    LearnConfig cfg;
    cfg.m = 2;
    cfg.alpha = 0.0;  // pre-smoothing comparison
    cfg.full_expansion = true;
    const auto cst = cst_build(S, cfg.m + 1, 2);
    const auto pst = learn_pst(cst, cfg);

    for (const std::string& ctx : {"a", "b", "aa", "ab", "ba", "bb"}) {
        const auto context = letters(ctx);
        const int node = pst.lookup(context);
        REQUIRE(pst.node_depth(node) == static_cast<int>(context.size()));
        for (int sigma = 0; sigma < 2; ++sigma) {
            const double expected = eq8_conditional(S, context, sigma, cfg.m);
            REQUIRE(expected >= 0.0);
            CHECK(pst.distribution(node)[static_cast<size_t>(sigma)] ==
                  doctest::Approx(expected).epsilon(1e-15));
        }
    }
}

TEST_CASE("an i.i.d. stream learns a root-only tree") {
    std::mt19937_64 rng(19);
    std::vector<int> S(100000);
    for (auto& s : S) s = static_cast<int>(rng() % 2);
    LearnConfig cfg;
    cfg.m = 2;
    const auto pst = learn_pst(cst_build(S, cfg.m + 1, 2), cfg);
    CHECK(pst.node_count() == 1);
}

TEST_CASE("a planted order-2 source grows the informative contexts") {
    const auto S = planted_order2_stream(100000, 23);
    LearnConfig cfg;
    cfg.m = 2;
    const auto pst = learn_pst(cst_build(S, cfg.m + 1, 2), cfg);
    for (const std::string& ctx : {"aa", "ab", "ba", "bb"}) {
        CHECK(pst.node_depth(pst.lookup(letters(ctx))) == 2);
    }
}

TEST_CASE("prediction walks to the deepest matching context") {
    const auto pst = testutil::example_pst();
    const auto at = [&](const std::string& ctx, int sigma) {
        return pst_predict(pst, letters(ctx))[static_cast<size_t>(sigma)];
    };
    CHECK(at("ba", 0) == doctest::Approx(0.1));
    CHECK(at("ba", 1) == doctest::Approx(0.9));
    CHECK(at("b", 0) == doctest::Approx(0.5));
    CHECK(at("", 0) == doctest::Approx(0.6));  // root distribution
    // deeper context than the tree still lands on the deepest node
    CHECK(at("bba", 0) == doctest::Approx(0.1));
    // unseen-context fallback: the ancestor chain answers
    CHECK(at("ab", 0) == doctest::Approx(0.5));  // node b
}

TEST_CASE("tree structure keeps complete sibling sets") {
    const auto pst = testutil::example_pst();
    for (int node = 0; node < pst.node_count(); ++node) {
        int children = 0;
        for (int sigma = 0; sigma < 2; ++sigma)
            if (pst.child(node, sigma) >= 0) ++children;
        CHECK((children == 0 || children == 2));
    }
}

TEST_CASE("smoothing lifts deficient entries and preserves the rest") {
    // floor = alpha / |alphabet| = 0.01
    const auto lifted = smooth({1.0, 0.0}, 0.02);
    CHECK(lifted[0] == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(lifted[1] == doctest::Approx(0.01).epsilon(1e-15));

    const auto untouched = smooth({0.6, 0.4}, 0.02);
    CHECK(untouched[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(untouched[1] == doctest::Approx(0.4).epsilon(1e-15));

    const auto uniform = smooth({0.5, 0.5}, 0.02);
    CHECK(uniform[0] == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> dist(4);
        double total = 0.0;
        for (auto& p : dist) total += (p = u(rng));
        for (auto& p : dist) p /= total;
        const auto s = smooth(dist, 0.1);
        double sum = 0.0;
        for (double p : s) {
            CHECK(p >= 0.1 / 4 - 1e-15);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("learned distributions are stochastic and floored") {
    const auto S = planted_order2_stream(20000, 31);
    LearnConfig cfg;
    cfg.m = 3;
    cfg.alpha = 0.01;
    const auto pst = learn_pst(cst_build(S, cfg.m + 1, 2), cfg);
    for (int node = 0; node < pst.node_count(); ++node) {
        double sum = 0.0;
        for (double p : pst.distribution(node)) {
            CHECK(p >= cfg.alpha / 2 - 1e-15);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("log-loss of the uniform model is exactly the alphabet entropy") {
    PredictionSuffixTree uniform(4, 1);
    std::mt19937_64 rng(37);
    std::vector<int> S(5000);
    for (auto& s : S) s = static_cast<int>(rng() % 4);
    CHECK(avg_log_loss(uniform, S) == 2.0);  // -log2(1/4), exact in binary
}

TEST_CASE("a deterministic predictor scores zero loss on its own output") {
    PredictionSuffixTree constant(2, 1);
    constant.set_distribution(0, {1.0, 0.0});
    CHECK(avg_log_loss(constant, letters("aaaaaa")) == 0.0);

    // alternator: after a comes b, after b comes a, with certainty
    PredictionSuffixTree pst(2, 1);
    pst.set_distribution(0, {0.5, 0.5});
    const int a = pst.ensure_node(std::vector<int>{0});
    pst.set_distribution(a, {0.0, 1.0});
    const int b = pst.ensure_node(std::vector<int>{1});
    pst.set_distribution(b, {1.0, 0.0});

    std::vector<int> S;
    for (int i = 1; i < 100; ++i) S.push_back(i % 2);
    const double loss = avg_log_loss(pst, S);
    // only the first, context-free position pays -log2(0.5)
    CHECK(loss == doctest::Approx(1.0 / 99.0).epsilon(1e-12));
}

TEST_CASE("zero-probability events are an error without smoothing") {
    PredictionSuffixTree pst(2, 1);
    pst.set_distribution(0, {1.0, 0.0});
    CHECK_THROWS(avg_log_loss(pst, letters("ab")));
}

TEST_CASE("the higher-order model wins on an order-2 source") {
    const auto S = planted_order2_stream(100000, 41);
    const size_t cut = 75000;
    const std::vector<int> train(S.begin(), S.begin() + cut);
    const std::vector<int> test(S.begin() + cut, S.end());

    LearnConfig order2;
    order2.m = 2;
    const auto model2 = learn_pst(cst_build(train, order2.m + 1, 2), order2);

    // root-only model: the i.i.d. view of the same stream
    PredictionSuffixTree model0(2, 1);
    const auto cst = cst_build(train, 2, 2);
    model0.set_distribution(0, smooth(empirical_distribution(cst, {}), order2.alpha));

    const double loss2 = avg_log_loss(model2, test);
    const double loss0 = avg_log_loss(model0, test);
    CHECK(loss2 < loss0 - 0.1);
}

TEST_CASE("learning validates its configuration") {
    std::vector<int> S(100, 0);
    const auto cst = cst_build(S, 2, 2);
    LearnConfig bad;
    bad.m = 0;
    CHECK_THROWS_AS(learn_pst(cst, bad), Error);
    bad.m = 1;
    bad.theta2 = 0.9;
    CHECK_THROWS_AS(learn_pst(cst, bad), Error);
    bad.theta2 = 1.05;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(learn_pst(cst, bad), Error);
    // depth m+1 is required
    LearnConfig deep;
    deep.m = 3;
    CHECK_THROWS_AS(learn_pst(cst, deep), Error);
}
