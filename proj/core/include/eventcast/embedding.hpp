#pragma once

#include <span>
#include <vector>

#include "eventcast/automata.hpp"
#include "eventcast/psa.hpp"

namespace eventcast {

/// Product of the pattern automaton and the learned suffix automaton: a
/// Markov chain whose final states mark pattern completion. Built
/// incrementally from the start frontier so only accessible states exist.
struct Embedding {
    int alphabet_size = 0;
    std::vector<std::pair<int, int>> states;  // (dsfa state, psa state)
    std::vector<int> starts;                  // one per psa state, (dsfa.start, s)
    std::vector<std::vector<int>> start_labels;  // psa label per start, for the wait protocol
    std::vector<char> finals;                 // dsfa component is final
    std::vector<int> delta;                   // state * alphabet + symbol -> state
    std::vector<double> transition_probs;     // gamma of the psa component
    std::vector<double> pi;                   // initial distribution over starts, 0 elsewhere

    int num_states() const { return static_cast<int>(states.size()); }
    int next(int state, int symbol) const {
        return delta[static_cast<size_t>(state) * static_cast<size_t>(alphabet_size) +
                     static_cast<size_t>(symbol)];
    }
    double prob(int state, int symbol) const {
        return transition_probs[static_cast<size_t>(state) * static_cast<size_t>(alphabet_size) +
                                static_cast<size_t>(symbol)];
    }
    bool is_final(int state) const { return finals[static_cast<size_t>(state)] != 0; }
    int dsfa_state(int state) const { return states[static_cast<size_t>(state)].first; }
    int psa_state(int state) const { return states[static_cast<size_t>(state)].second; }
    int state_of(int dsfa_q, int psa_q) const;
};

Embedding embed(const Dsfa& dsfa, const Psa& psa, int state_budget = kDefaultStateBudget);

/// pi(start) times the product of edge probabilities along the unique run.
/// The run starts once a word prefix equals a psa state label; words shorter
/// than every label cannot be scored.
std::optional<double> string_probability(const Embedding& emb, std::span<const int> word);

/// Language acceptance of a word: the whole word runs through delta from a
/// start state. The pattern component moves identically from every start, so
/// acceptance is start-independent (probability, by contrast, goes through
/// the label-match protocol).
bool embedding_accepts(const Embedding& emb, std::span<const int> word);

/// Start state whose psa label equals a prefix of the word, with the number
/// of symbols that prefix consumed; nullopt when no prefix matches.
std::optional<std::pair<int, size_t>> resolve_start(const Embedding& emb,
                                                    std::span<const int> word);

/// Row-stochastic chain matrix over embedding states, reordered so the
/// non-final block N comes first and the final block F last.
struct PartitionedMatrix {
    int num_non_final = 0;
    int num_final = 0;
    std::vector<int> matrix_index;  // embedding state -> row/column
    std::vector<int> state_index;   // row/column -> embedding state
    std::vector<double> pi;         // dense (n+f) x (n+f), row-major

    int size() const { return num_non_final + num_final; }
    double at(int row, int col) const {
        return pi[static_cast<size_t>(row) * static_cast<size_t>(size()) +
                  static_cast<size_t>(col)];
    }
};

/// Merges parallel symbol edges into state-to-state probabilities and
/// arranges the blocks N, N_F, F_N, F.
PartitionedMatrix partition_matrix(const Embedding& emb);

}  // namespace eventcast
