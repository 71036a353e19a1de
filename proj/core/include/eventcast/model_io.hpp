#pragma once

#include <optional>
#include <string>

#include "eventcast/automata.hpp"
#include "eventcast/psa.hpp"

namespace eventcast {

/// Pattern declaration as read from the pattern JSON config.
struct PatternConfig {
    std::string pattern;                                  // expression text
    std::vector<std::pair<std::string, std::string>> predicates;  // name -> expression
    std::vector<std::vector<std::string>> exclusions;     // groups of predicate names
    std::vector<std::string> extra_predicates;            // enrich the minterm alphabet
    std::string policy = "strict";                        // or "skip-till-any"
};

PatternConfig pattern_config_from_json(const std::string& text);
PatternConfig load_pattern_config(const std::string& path);

/// Everything the pipeline needs for one pattern: the policy-rewritten
/// streaming expression, its minterm alphabet and the deterministic
/// automaton.
struct CompiledPattern {
    Sre pattern;     // as written (after the selection-policy rewrite)
    Sre streaming;   // TRUE* prefixed
    MintermSet minterms;
    Dsfa dsfa;
    int unsatisfiable_minterms = 0;  // interval reasoning, informational
};

using ExternalRegistry = std::map<std::string, ExternalFn>;

CompiledPattern compile_pattern(const PatternConfig& config,
                                const ExternalRegistry& externals = {},
                                int state_budget = kDefaultStateBudget);

/// Versioned model file: minterm alphabet, tree nodes with label and
/// distribution, optionally the derived suffix automaton. Probabilities
/// round-trip bit exactly.
std::string model_to_json(const PredictionSuffixTree& pst, const MintermSet& minterms,
                          const Psa* psa = nullptr);

struct LoadedModel {
    int order = 0;
    std::vector<std::string> alphabet;  // minterm descriptions
    PredictionSuffixTree pst;
    std::optional<Psa> psa;
};

LoadedModel model_from_json(const std::string& text);
void save_model(const std::string& path, const PredictionSuffixTree& pst,
                const MintermSet& minterms, const Psa* psa = nullptr);
LoadedModel load_model(const std::string& path);

}  // namespace eventcast
