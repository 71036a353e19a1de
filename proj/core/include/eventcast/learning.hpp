#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "eventcast/error.hpp"

namespace eventcast {

/// Reversed-context occurrence counters over the minterm symbol stream.
/// The path root -> x1 -> ... -> xd holds the number of occurrences of the
/// string xd...x1 ending at window positions [depth, k] of the training
/// stream, exactly the counters behind the empirical probability ratios.
class CounterSuffixTree {
public:
    CounterSuffixTree(int alphabet_size, int depth);

    int alphabet_size() const { return alphabet_size_; }
    int depth() const { return depth_; }
    std::int64_t total_windows() const { return windows_; }
    std::size_t node_count() const { return nodes_.size() - 1; }  // root excluded

    /// Single pass: every full window of `depth` symbols is fed reversed.
    /// Call repeatedly for multi-partition training data; counts accumulate
    /// and windows never span sequence boundaries.
    void add_sequence(std::span<const int> symbols);

    /// Occurrences of `s` (natural order, last element = most recent).
    std::int64_t count(std::span<const int> s) const;

    /// Successor counters count(s . sigma) for all sigma at once.
    std::vector<std::int64_t> successor_counts(std::span<const int> s) const;

    /// Visit every stored context of length `length`, in lexicographic order.
    void visit_contexts(int length,
                        const std::function<void(const std::vector<int>&, std::int64_t)>& fn) const;

    /// Sum of counters at one level; equal across levels by construction.
    std::int64_t level_sum(int level) const;

private:
    struct Node {
        std::int64_t counter = 0;
        std::vector<int> children;  // symbol -> node index, -1 absent
    };

    int node_for(std::span<const int> s) const;  // -1 when absent

    int alphabet_size_;
    int depth_;
    std::int64_t windows_ = 0;
    std::vector<Node> nodes_;  // 0 = root
};

/// Builds the tree from one symbol sequence; `m` is the window length /
/// maximum depth. Training with order m uses depth m+1 so the numerators of
/// the conditional ratios (context plus one successor) are available in the
/// same pass.
CounterSuffixTree cst_build(std::span<const int> symbols, int m, int alphabet_size);

/// Empirical conditional P(symbol | context) as a plain count ratio; uniform
/// when the context has no successor evidence. Context length must be below
/// the tree depth.
double empirical_prob(const CounterSuffixTree& cst, std::span<const int> context, int symbol);

/// All symbols at once (one denominator computation).
std::vector<double> empirical_distribution(const CounterSuffixTree& cst,
                                           std::span<const int> context);

struct LearnConfig {
    int m = 1;               // maximum order
    double alpha = 0.01;     // smoothing knob; probability floor is alpha/|alphabet|
    int n = 1200;            // state budget for the derived suffix automaton
    double theta1 = 0.001;   // "often enough" threshold
    double theta2 = 1.05;    // "meaningful enough" ratio threshold
    bool full_expansion = false;  // keep every observed context up to depth m

    void validate() const {
        if (m < 1) throw_config("order m must be >= 1");
        if (!(theta1 < 1.0) || theta1 < 0.0) throw_config("theta1 must lie in [0, 1)");
        if (!(theta2 > 1.0)) throw_config("theta2 must be > 1");
        if (alpha < 0.0 || alpha >= 1.0) throw_config("alpha must lie in [0, 1)");
        if (n < 1) throw_config("state budget n must be positive");
    }
};

/// Variable-order conditional next-symbol distributions, one node per
/// retained context. Children extend a context one symbol further into the
/// past; every internal node carries all |alphabet| children.
class PredictionSuffixTree {
public:
    PredictionSuffixTree(int alphabet_size, int max_depth);

    int alphabet_size() const { return alphabet_size_; }
    int max_depth() const { return max_depth_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int root() const { return 0; }

    int parent(int node) const { return nodes_[static_cast<size_t>(node)].parent; }
    int child(int node, int symbol) const;
    bool is_leaf(int node) const;
    int node_depth(int node) const;
    std::vector<int> label(int node) const;  // context in natural order
    const std::vector<double>& distribution(int node) const;
    std::int64_t context_count(int node) const { return nodes_[static_cast<size_t>(node)].count; }

    /// Deepest node whose label is a suffix of `context`.
    int lookup(std::span<const int> context) const;

    std::vector<int> leaves() const;

    /// Ensures the node for `context` exists, creating ancestors as needed;
    /// returns its index. Distribution and count set by the caller.
    int ensure_node(std::span<const int> context);

    void set_distribution(int node, std::vector<double> gamma);
    void set_count(int node, std::int64_t count);

    /// Gives every internal node its full set of |alphabet| children
    /// (missing ones inherit distribution/count via `fill`).
    void complete_siblings(
        const std::function<std::pair<std::vector<double>, std::int64_t>(const std::vector<int>&)>&
            fill);

private:
    struct Node {
        int parent = -1;
        int symbol = -1;  // symbol prepended to the parent's context
        std::vector<int> children;
        std::vector<double> gamma;
        std::int64_t count = 0;
    };

    int alphabet_size_;
    int max_depth_;
    std::vector<Node> nodes_;
};

/// Context retention check: some successor must be frequent (> theta1) and
/// its conditional must differ from the shorter context's by more than the
/// theta2 ratio band. Exposed for direct testing of worked ratio examples.
bool expansion_worthwhile(std::span<const double> dist, std::span<const double> parent_dist,
                          double theta1, double theta2);

/// Learns the tree from the counters: candidate contexts swept breadth-first
/// up to depth m, retained by the two-threshold test (or unconditionally in
/// full-expansion mode), then suffix-closed and sibling-completed. Stored
/// distributions are smoothed with floor alpha/|alphabet|.
PredictionSuffixTree learn_pst(const CounterSuffixTree& cst, const LearnConfig& cfg);

/// Distribution of the node reached with the (up to m) most recent symbols.
const std::vector<double>& pst_predict(const PredictionSuffixTree& pst,
                                       std::span<const int> context);

/// Probability floor alpha/|dist| applied by raising deficient entries and
/// removing the added mass from the surplus ones; sums are preserved.
std::vector<double> smooth(std::vector<double> dist, double alpha);

/// Average base-2 log-loss of the model on a test sequence; position i is
/// predicted from the up-to-m preceding symbols. Errors on a zero-probability
/// event (impossible with a positive smoothing floor).
double avg_log_loss(const PredictionSuffixTree& pst, std::span<const int> test);

/// Multi-partition variant: total loss over all positions of all sequences.
double avg_log_loss(const PredictionSuffixTree& pst,
                    const std::vector<std::vector<int>>& sequences);

}  // namespace eventcast
