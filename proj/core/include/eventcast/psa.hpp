#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eventcast/learning.hpp"

namespace eventcast {

/// Probabilistic suffix automaton: the Markov-chain form of a transition-
/// closed prediction suffix tree. States are labeled by suffix-free context
/// strings; tau follows the unique leaf that is a suffix of label . symbol.
struct Psa {
    int alphabet_size = 0;
    std::vector<std::vector<int>> labels;   // state -> context, natural order
    std::vector<int> tau;                   // state * alphabet + symbol -> state
    std::vector<double> gamma;              // state * alphabet + symbol -> probability
    std::vector<double> pi;                 // initial distribution over states

    int num_states() const { return static_cast<int>(labels.size()); }
    int next(int state, int symbol) const {
        return tau[static_cast<size_t>(state) * static_cast<size_t>(alphabet_size) +
                   static_cast<size_t>(symbol)];
    }
    double prob(int state, int symbol) const {
        return gamma[static_cast<size_t>(state) * static_cast<size_t>(alphabet_size) +
                     static_cast<size_t>(symbol)];
    }
    /// State with exactly this label, -1 if absent.
    int state_of_label(std::span<const int> label) const;
};

/// Expands leaves until the leaf set is transition-closed: for every leaf s
/// and symbol there must be a leaf that is a suffix of s . symbol. New
/// children inherit the unexpanded parent's distribution. Counts for the new
/// contexts come from `cst` when provided (parent counts are split uniformly
/// otherwise). Depth never exceeds the tree's existing maximum.
PredictionSuffixTree close_pst_for_psa(const PredictionSuffixTree& pst,
                                       const CounterSuffixTree* cst = nullptr,
                                       int state_budget = 1200);

/// Leaves of the closed tree become states; pi is the normalized empirical
/// frequency of each state label as a training-stream window.
Psa pst_to_psa(const PredictionSuffixTree& pst, const CounterSuffixTree* cst = nullptr,
               int state_budget = 1200);

/// Structural well-formedness: suffix-free labels, the tau suffix condition,
/// stochastic gamma rows and a stochastic pi. Throws on violation.
void validate_psa(const Psa& psa, double tol = 1e-12);

/// Probability the automaton assigns to a word: waits until some prefix
/// equals a state label, then multiplies pi and the per-symbol gammas.
/// nullopt when no prefix matches any label.
std::optional<double> psa_probability(const Psa& psa, std::span<const int> word);

}  // namespace eventcast
