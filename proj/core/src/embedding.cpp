#include "eventcast/embedding.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace eventcast {

int Embedding::state_of(int dsfa_q, int psa_q) const {
    for (int i = 0; i < num_states(); ++i) {
        if (states[static_cast<size_t>(i)].first == dsfa_q &&
            states[static_cast<size_t>(i)].second == psa_q)
            return i;
    }
    return -1;
}

Embedding embed(const Dsfa& dsfa, const Psa& psa, int state_budget) {
    if (psa.alphabet_size != dsfa.num_symbols)
        throw_config("suffix automaton and pattern automaton use different alphabets");
    const int t = dsfa.num_symbols;

    Embedding emb;
    emb.alphabet_size = t;

    std::map<std::pair<int, int>, int> ids;
    auto intern = [&](int r, int s) {
        auto key = std::make_pair(r, s);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        const int id = static_cast<int>(emb.states.size());
        if (id >= state_budget)
            throw_budget("embedding exceeded the state budget of " + std::to_string(state_budget));
        ids.emplace(key, id);
        emb.states.emplace_back(r, s);
        return id;
    };

    // frontier seeded with (dsfa start, s) for every psa state
    std::deque<int> frontier;
    for (int s = 0; s < psa.num_states(); ++s) {
        const int id = intern(dsfa.start, s);
        emb.starts.push_back(id);
        frontier.push_back(id);
    }

    std::vector<char> expanded;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop_front();
        if (static_cast<size_t>(q) < expanded.size() && expanded[static_cast<size_t>(q)]) continue;
        if (expanded.size() <= static_cast<size_t>(q)) expanded.resize(static_cast<size_t>(q) + 1, 0);
        expanded[static_cast<size_t>(q)] = 1;

        const auto [r, s] = emb.states[static_cast<size_t>(q)];
        for (int sigma = 0; sigma < t; ++sigma) {
            const int r_next = dsfa.next(r, sigma);
            const int s_next = psa.next(s, sigma);
            const int q_next = intern(r_next, s_next);
            const size_t slot = static_cast<size_t>(q) * static_cast<size_t>(t) +
                                static_cast<size_t>(sigma);
            if (emb.delta.size() <= slot) {
                emb.delta.resize((static_cast<size_t>(emb.states.size())) * static_cast<size_t>(t),
                                 -1);
                emb.transition_probs.resize(emb.delta.size(), 0.0);
            }
            emb.delta[slot] = q_next;
            emb.transition_probs[slot] = psa.prob(s, sigma);
            if (static_cast<size_t>(q_next) >= expanded.size() ||
                !expanded[static_cast<size_t>(q_next)])
                frontier.push_back(q_next);
        }
    }

    emb.delta.resize(static_cast<size_t>(emb.states.size()) * static_cast<size_t>(t), -1);
    emb.transition_probs.resize(emb.delta.size(), 0.0);

    emb.finals.assign(emb.states.size(), 0);
    for (size_t i = 0; i < emb.states.size(); ++i) {
        if (dsfa.is_final(emb.states[i].first)) emb.finals[i] = 1;
    }

    // pi: the psa's initial distribution on the start copies, zero elsewhere
    emb.pi.assign(emb.states.size(), 0.0);
    for (int s = 0; s < psa.num_states(); ++s) {
        emb.pi[static_cast<size_t>(emb.starts[static_cast<size_t>(s)])] =
            psa.pi[static_cast<size_t>(s)];
        emb.start_labels.push_back(psa.labels[static_cast<size_t>(s)]);
    }
    return emb;
}

std::optional<std::pair<int, size_t>> resolve_start(const Embedding& emb,
                                                    std::span<const int> word) {
    for (size_t l = 1; l <= word.size(); ++l) {
        for (size_t s = 0; s < emb.starts.size(); ++s) {
            const auto& label = emb.start_labels[s];
            if (label.size() == l && std::equal(label.begin(), label.end(), word.begin()))
                return std::make_pair(emb.starts[s], l);
        }
    }
    return std::nullopt;
}

std::optional<double> string_probability(const Embedding& emb, std::span<const int> word) {
    const auto start = resolve_start(emb, word);
    if (!start) return std::nullopt;  // shorter than every start label
    auto [state, consumed] = *start;
    double p = emb.pi[static_cast<size_t>(state)];
    for (size_t i = consumed; i < word.size(); ++i) {
        p *= emb.prob(state, word[i]);
        state = emb.next(state, word[i]);
    }
    return p;
}

bool embedding_accepts(const Embedding& emb, std::span<const int> word) {
    // language acceptance runs the whole word; the pattern component evolves
    // the same way from every start, so any start state serves
    if (emb.starts.empty()) return false;
    int state = emb.starts[0];
    for (int symbol : word) state = emb.next(state, symbol);
    return emb.is_final(state);
}

PartitionedMatrix partition_matrix(const Embedding& emb) {
    PartitionedMatrix pm;
    const int n = emb.num_states();
    pm.matrix_index.assign(static_cast<size_t>(n), -1);

    // non-final states first, then finals, both in state order
    for (int q = 0; q < n; ++q) {
        if (!emb.is_final(q)) {
            pm.matrix_index[static_cast<size_t>(q)] = static_cast<int>(pm.state_index.size());
            pm.state_index.push_back(q);
        }
    }
    pm.num_non_final = static_cast<int>(pm.state_index.size());
    for (int q = 0; q < n; ++q) {
        if (emb.is_final(q)) {
            pm.matrix_index[static_cast<size_t>(q)] = static_cast<int>(pm.state_index.size());
            pm.state_index.push_back(q);
        }
    }
    pm.num_final = n - pm.num_non_final;

    pm.pi.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int q = 0; q < n; ++q) {
        const int row = pm.matrix_index[static_cast<size_t>(q)];
        for (int sigma = 0; sigma < emb.alphabet_size; ++sigma) {
            const int target = emb.next(q, sigma);
            if (target < 0) throw_internal("embedding has an unfilled transition");
            const int col = pm.matrix_index[static_cast<size_t>(target)];
            // parallel symbol edges between the same pair merge by summation
            pm.pi[static_cast<size_t>(row) * static_cast<size_t>(n) + static_cast<size_t>(col)] +=
                emb.prob(q, sigma);
        }
    }
    return pm;
}

}  // namespace eventcast
