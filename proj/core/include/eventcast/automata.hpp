#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eventcast/pattern.hpp"

namespace eventcast {

/// Symbolic NFA with epsilon moves, straight out of the constructive proof:
/// one fragment per expression node, fresh start/final per operator.
struct Sfa {
    struct Transition {
        int source = 0;
        std::optional<Predicate> guard;  // nullopt = epsilon
        int target = 0;
    };

    int num_states = 0;
    int start = 0;
    std::vector<int> finals;
    std::vector<Transition> transitions;
};

/// Thompson-style construction. |Q| <= 2 x (number of expression nodes).
/// Rejects the empty-language pattern.
Sfa compile_sfa(const Sre& r);

/// Complete deterministic automaton over the minterm alphabet. The dense
/// table makes the per-event transition a single indexed load.
struct Dsfa {
    int num_states = 0;
    int start = 0;
    int num_symbols = 0;
    std::vector<char> final_states;       // indexed by state
    std::vector<int> table;               // state * num_symbols + symbol -> state

    int next(int state, int symbol) const {
        return table[static_cast<size_t>(state) * static_cast<size_t>(num_symbols) +
                     static_cast<size_t>(symbol)];
    }
    bool is_final(int state) const { return final_states[static_cast<size_t>(state)] != 0; }

    /// State reached from `start` by a word; handy for pinning states in tests.
    int run_word(std::span<const int> word) const {
        int q = start;
        for (int s : word) q = next(q, s);
        return q;
    }
};

inline constexpr int kDefaultStateBudget = 1200;

/// Incremental subset construction with epsilon closure over the relabeled
/// alphabet; only accessible subsets are materialized and the result is
/// complete over all minterms. Behavior-duplicate subsets are merged so the
/// state count matches the automaton's distinguishable behaviors.
Dsfa determinize(const Sfa& sfa, const MintermSet& minterms, int state_budget = kDefaultStateBudget);

/// Partition-refinement merge of equivalent states; keeps completeness and
/// reachability.
Dsfa merge_equivalent_states(const Dsfa& dsfa);

/// Per-partition run bookkeeping for streaming recognition.
class RunState {
public:
    explicit RunState(const Dsfa& dsfa) : dsfa_(&dsfa) {}

    /// Advances the partition's run with one classified event; returns the
    /// new state.
    int step(const std::string& partition, int symbol) {
        auto [it, inserted] = states_.try_emplace(partition, dsfa_->start);
        it->second = dsfa_->next(it->second, symbol);
        return it->second;
    }

    int current(const std::string& partition) const {
        auto it = states_.find(partition);
        return it == states_.end() ? dsfa_->start : it->second;
    }

private:
    const Dsfa* dsfa_;
    std::map<std::string, int> states_;
};

struct RecognitionResult {
    // 1-based positions within each partition's sub-stream
    std::map<std::string, std::vector<std::int64_t>> matches_by_partition;
    // (partition, 1-based global stream index) in stream order
    std::vector<std::pair<std::string, std::int64_t>> matches_global;
    std::int64_t events_consumed = 0;
    std::int64_t events_skipped = 0;  // classification no-match, reported and skipped
};

/// Streaming recognition: reports every index k at which the run (held
/// independently per partition) enters a final state.
RecognitionResult recognize(const Dsfa& dsfa, const std::vector<Event>& stream,
                            const MintermSet& minterms);

/// Same, over pre-classified symbol streams (one sequence per partition).
std::vector<std::int64_t> recognize_symbols(const Dsfa& dsfa, std::span<const int> symbols);

std::string dsfa_to_json(const Dsfa& dsfa, const MintermSet& minterms);
Dsfa dsfa_from_json(const std::string& text);

}  // namespace eventcast
