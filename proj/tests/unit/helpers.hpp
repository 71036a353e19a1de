#pragma once

#include <random>
#include <string>
#include <vector>

#include "eventcast/model_io.hpp"

namespace testutil {

using namespace eventcast;

inline Event make_event(double speed) {
    Event e;
    e.timestamp = 1;
    e.partition = "v1";
    e.attributes["speed"] = speed;
    return e;
}

// two named predicates over one attribute, mutually exclusive: the Table-3 setup
inline MintermSet speed_minterms(bool with_exclusion = true) {
    std::vector<Predicate> preds = {parse_predicate("speed < 5"), parse_predicate("speed > 20")};
    std::vector<std::vector<int>> groups;
    if (with_exclusion) groups.push_back({0, 1});
    return build_minterms(preds, groups);
}

// A k-letter alphabet with exactly k minterms: k-1 mutually exclusive value
// predicates x = 0 .. x = k-2 plus the all-negative minterm as the last
// letter. Letter i maps to minterm id i.
struct LetterAlphabet {
    int k;
    MintermSet minterms;

    explicit LetterAlphabet(int letters)
        : k(letters), minterms(build(letters)) {}

    static MintermSet build(int letters) {
        std::vector<Predicate> preds;
        std::vector<int> group;
        for (int i = 0; i + 1 < letters; ++i) {
            preds.push_back(pred_cmp("x", CmpOp::Eq, static_cast<double>(i)));
            group.push_back(i);
        }
        std::vector<std::vector<int>> groups;
        if (group.size() > 1) groups.push_back(group);
        return build_minterms(preds, groups);
    }

    int symbol(char letter) const { return letter - 'a'; }

    std::vector<int> word(const std::string& letters) const {
        std::vector<int> out;
        for (char c : letters) out.push_back(symbol(c));
        return out;
    }

    Event event_for(char letter) const {
        Event e;
        e.timestamp = 0;
        e.partition = "p";
        e.attributes["x"] = static_cast<double>(letter - 'a');
        return e;
    }

    // predicate holding exactly on one letter
    Predicate letter_pred(char letter) const {
        const int i = letter - 'a';
        if (i + 1 < k) return minterms.base_predicates()[static_cast<size_t>(i)];
        Predicate p;
        for (const auto& base : minterms.base_predicates()) {
            Predicate neg = pred_not(base);
            p = p ? pred_and(p, neg) : neg;
        }
        return p ? p : pred_true();
    }

    Sre letter_sre(char letter) const { return sre_pred(letter_pred(letter)); }
};

inline std::vector<int> random_word(std::mt19937_64& rng, int alphabet, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> sym(0, alphabet - 1);
    std::vector<int> out(static_cast<size_t>(len(rng)));
    for (auto& s : out) s = sym(rng);
    return out;
}

// the worked two-letter example tree: contexts a, b, aa, ba with the
// published next-symbol distributions
inline PredictionSuffixTree example_pst() {
    PredictionSuffixTree pst(2, 2);
    pst.set_distribution(0, {0.6, 0.4});
    pst.set_count(0, 10);
    const int a = pst.ensure_node(std::vector<int>{0});
    pst.set_distribution(a, {0.7, 0.3});
    pst.set_count(a, 6);
    const int b = pst.ensure_node(std::vector<int>{1});
    pst.set_distribution(b, {0.5, 0.5});
    pst.set_count(b, 4);
    const int aa = pst.ensure_node(std::vector<int>{0, 0});
    pst.set_distribution(aa, {0.75, 0.25});
    pst.set_count(aa, 4);
    const int ba = pst.ensure_node(std::vector<int>{1, 0});
    pst.set_distribution(ba, {0.1, 0.9});
    pst.set_count(ba, 2);
    return pst;
}

// deterministic complete automaton over two letters accepting streams whose
// suffix matches "ab" — the worked three-state example
inline Dsfa example_ab_dsfa(const LetterAlphabet& ab) {
    const Sre r = to_streaming(sre_concat(ab.letter_sre('a'), ab.letter_sre('b')));
    return determinize(compile_sfa(r), ab.minterms);
}

}  // namespace testutil
