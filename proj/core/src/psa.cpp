#include "eventcast/psa.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace eventcast {

namespace {

bool is_suffix(std::span<const int> suffix, std::span<const int> full) {
    if (suffix.size() > full.size()) return false;
    return std::equal(suffix.begin(), suffix.end(), full.end() - suffix.size());
}

}  // namespace

int Psa::state_of_label(std::span<const int> label) const {
    for (int q = 0; q < num_states(); ++q) {
        const auto& l = labels[static_cast<size_t>(q)];
        if (l.size() == label.size() && std::equal(l.begin(), l.end(), label.begin())) return q;
    }
    return -1;
}

PredictionSuffixTree close_pst_for_psa(const PredictionSuffixTree& pst,
                                       const CounterSuffixTree* cst, int state_budget) {
    PredictionSuffixTree tree = pst;
    const int t = tree.alphabet_size();

    for (;;) {
        bool expanded = false;
        const auto leaves = tree.leaves();
        if (static_cast<int>(leaves.size()) > state_budget)
            throw_budget("suffix automaton closure exceeded the state budget of " +
                         std::to_string(state_budget));
        for (int leaf : leaves) {
            std::vector<int> extended = tree.label(leaf);
            extended.push_back(-1);
            bool needs_expansion = false;
            for (int sigma = 0; sigma < t && !needs_expansion; ++sigma) {
                extended.back() = sigma;
                // With complete sibling sets the walk stops either at a leaf
                // (the wanted suffix) or at the internal node spelling the
                // whole extension; the latter means the leaf set is not
                // transition-closed yet.
                if (!tree.is_leaf(tree.lookup(extended))) needs_expansion = true;
            }
            if (!needs_expansion) continue;

            const auto parent_gamma = tree.distribution(leaf);
            const std::int64_t parent_count = tree.context_count(leaf);
            const auto parent_label = tree.label(leaf);
            for (int sigma = 0; sigma < t; ++sigma) {
                std::vector<int> child_label = parent_label;
                child_label.insert(child_label.begin(), sigma);
                int node = tree.ensure_node(child_label);
                tree.set_distribution(node, parent_gamma);
                std::int64_t count;
                if (cst && static_cast<int>(child_label.size()) <= cst->depth()) {
                    count = cst->count(child_label);
                } else {
                    count = parent_count / t;  // best effort without counters
                }
                tree.set_count(node, count);
            }
            expanded = true;
        }
        if (!expanded) return tree;
    }
}

Psa pst_to_psa(const PredictionSuffixTree& pst, const CounterSuffixTree* cst, int state_budget) {
    if (pst.node_count() == 0) throw_config("cannot convert an empty tree");
    const PredictionSuffixTree tree = close_pst_for_psa(pst, cst, state_budget);
    const int t = tree.alphabet_size();

    auto leaf_nodes = tree.leaves();
    if (static_cast<int>(leaf_nodes.size()) > state_budget)
        throw_budget("suffix automaton exceeds the state budget of " +
                     std::to_string(state_budget));

    // canonical state order: label length, then lexicographic
    std::vector<std::pair<std::vector<int>, int>> ordered;
    ordered.reserve(leaf_nodes.size());
    for (int node : leaf_nodes) ordered.emplace_back(tree.label(node), node);
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });

    Psa psa;
    psa.alphabet_size = t;
    std::map<int, int> state_of_node;
    for (const auto& [label, node] : ordered) {
        state_of_node[node] = psa.num_states();
        psa.labels.push_back(label);
    }

    psa.tau.assign(psa.labels.size() * static_cast<size_t>(t), -1);
    psa.gamma.assign(psa.labels.size() * static_cast<size_t>(t), 0.0);
    for (const auto& [label, node] : ordered) {
        const int q = state_of_node[node];
        const auto& dist = tree.distribution(node);
        std::vector<int> extended = label;
        extended.push_back(-1);
        for (int sigma = 0; sigma < t; ++sigma) {
            extended.back() = sigma;
            const int target_node = tree.lookup(extended);
            if (!tree.is_leaf(target_node))
                throw_internal("closed tree lookup did not land on a leaf");
            psa.tau[static_cast<size_t>(q) * static_cast<size_t>(t) + static_cast<size_t>(sigma)] =
                state_of_node[target_node];
            psa.gamma[static_cast<size_t>(q) * static_cast<size_t>(t) +
                      static_cast<size_t>(sigma)] = dist[static_cast<size_t>(sigma)];
        }
    }

    // pi: empirical frequency of each label as a training window
    psa.pi.assign(psa.labels.size(), 0.0);
    double total = 0.0;
    for (const auto& [label, node] : ordered) {
        const double c = static_cast<double>(tree.context_count(node));
        psa.pi[static_cast<size_t>(state_of_node[node])] = c;
        total += c;
    }
    if (total > 0.0) {
        for (double& p : psa.pi) p /= total;
    } else {
        std::fill(psa.pi.begin(), psa.pi.end(), 1.0 / static_cast<double>(psa.pi.size()));
    }
    return psa;
}

void validate_psa(const Psa& psa, double tol) {
    const int t = psa.alphabet_size;
    for (int q1 = 0; q1 < psa.num_states(); ++q1) {
        for (int q2 = 0; q2 < psa.num_states(); ++q2) {
            if (q1 == q2) continue;
            if (is_suffix(psa.labels[static_cast<size_t>(q1)], psa.labels[static_cast<size_t>(q2)]))
                throw_internal("suffix automaton labels are not suffix free");
        }
    }
    double pi_sum = 0.0;
    for (int q = 0; q < psa.num_states(); ++q) {
        double row = 0.0;
        for (int sigma = 0; sigma < t; ++sigma) {
            const int target = psa.next(q, sigma);
            if (target < 0 || target >= psa.num_states())
                throw_internal("suffix automaton transition out of range");
            std::vector<int> extended = psa.labels[static_cast<size_t>(q)];
            extended.push_back(sigma);
            if (!is_suffix(psa.labels[static_cast<size_t>(target)], extended))
                throw_internal("suffix automaton violates the tau suffix condition");
            row += psa.prob(q, sigma);
        }
        if (std::abs(row - 1.0) > tol)
            throw_internal("suffix automaton row does not sum to one");
        pi_sum += psa.pi[static_cast<size_t>(q)];
    }
    if (std::abs(pi_sum - 1.0) > tol)
        throw_internal("suffix automaton initial distribution does not sum to one");
}

std::optional<double> psa_probability(const Psa& psa, std::span<const int> word) {
    // find the earliest prefix that equals a state label
    int state = -1;
    size_t consumed = 0;
    for (size_t l = 1; l <= word.size(); ++l) {
        state = psa.state_of_label(word.subspan(0, l));
        if (state >= 0) {
            consumed = l;
            break;
        }
    }
    if (state < 0) return std::nullopt;
    double p = psa.pi[static_cast<size_t>(state)];
    for (size_t i = consumed; i < word.size(); ++i) {
        p *= psa.prob(state, word[i]);
        state = psa.next(state, word[i]);
    }
    return p;
}

}  // namespace eventcast
