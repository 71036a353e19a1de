#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eventcast/algebra.hpp"

namespace eventcast {

/// Symbolic regular expression over the predicate algebra.
///
///   expr   := term ('+' term)*          union, lowest precedence
///   term   := factor (';' factor)*      concatenation
///   factor := atom '*'?                 iteration binds tightest
///   atom   := predicate-ref | '!' atom | '(' expr ')' | 'eps'
///
/// Predicate refs are names registered in the pattern config or inline
/// comparisons such as `speed < 5`.

struct SreNode;
using Sre = std::shared_ptr<const SreNode>;

struct SreNode {
    enum class Kind { Epsilon, Empty, Pred, Union, Concat, Star };

    Kind kind = Kind::Epsilon;
    Predicate pred;  // Pred
    Sre left;        // Union/Concat/Star child
    Sre right;       // Union/Concat
};

Sre sre_epsilon();
Sre sre_empty();
Sre sre_pred(Predicate p);
Sre sre_union(Sre a, Sre b);
Sre sre_concat(Sre a, Sre b);
Sre sre_star(Sre a);  // Star over epsilon normalizes to epsilon

Sre parse_sre(const std::string& text, const PredicateResolver& resolver = nullptr);
std::string to_string(const Sre& r);

/// R_s = TRUE* . R — lets recognition start at any stream position.
Sre to_streaming(const Sre& r);

/// skip-till-any-match: every concatenation R1.R2 becomes R1.TRUE*.R2,
/// applied recursively, so any number of events may occur in between.
Sre rewrite_skip_till_any(const Sre& r);

/// Collect the distinct predicates appearing at Pred leaves, in first-seen
/// order (TRUE/FALSE leaves excluded: they are not alphabet material).
std::vector<Predicate> collect_predicates(const Sre& r);

/// Declarative language membership over the relabeled alphabet: is the word
/// of minterm ids in L(r)? Direct recursion on the definition with dynamic
/// programming over split points; used as the oracle for the automata path.
bool sre_membership(const Sre& r, std::span<const int> word, const MintermSet& minterms);

/// Number of (m, k) index pairs with word[m..k] in L(r); the declarative
/// match-instance count used to validate selection-policy rewrites.
long match_count_oracle(const Sre& r, std::span<const int> word, const MintermSet& minterms);

}  // namespace eventcast
