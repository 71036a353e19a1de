#include "eventcast/automata.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include <json.hpp>

#include "eventcast/error.hpp"

namespace eventcast {

namespace {

struct Fragment {
    int start;
    int final;
};

struct SfaBuilder {
    Sfa sfa;

    int fresh() { return sfa.num_states++; }

    void edge(int from, std::optional<Predicate> guard, int to) {
        sfa.transitions.push_back({from, std::move(guard), to});
    }

    Fragment build(const Sre& r) {
        switch (r->kind) {
            case SreNode::Kind::Empty:
                throw_config("empty-language pattern cannot be compiled");
            case SreNode::Kind::Epsilon: {
                int s = fresh(), f = fresh();
                edge(s, std::nullopt, f);
                return {s, f};
            }
            case SreNode::Kind::Pred: {
                int s = fresh(), f = fresh();
                edge(s, r->pred, f);
                return {s, f};
            }
            case SreNode::Kind::Union: {
                Fragment a = build(r->left);
                Fragment b = build(r->right);
                int s = fresh(), f = fresh();
                edge(s, std::nullopt, a.start);
                edge(s, std::nullopt, b.start);
                edge(a.final, std::nullopt, f);
                edge(b.final, std::nullopt, f);
                return {s, f};
            }
            case SreNode::Kind::Concat: {
                Fragment a = build(r->left);
                Fragment b = build(r->right);
                edge(a.final, std::nullopt, b.start);
                return {a.start, b.final};
            }
            case SreNode::Kind::Star: {
                Fragment a = build(r->left);
                int s = fresh(), f = fresh();
                edge(s, std::nullopt, a.start);   // enter the loop
                edge(s, std::nullopt, f);         // bypass, accepts epsilon
                edge(a.final, std::nullopt, a.start);  // iterate
                edge(a.final, std::nullopt, f);
                return {s, f};
            }
        }
        throw_internal("corrupt expression node");
    }
};

}  // namespace

Sfa compile_sfa(const Sre& r) {
    SfaBuilder b;
    Fragment frag = b.build(r);
    b.sfa.start = frag.start;
    b.sfa.finals = {frag.final};
    return b.sfa;
}

namespace {

// adjacency prepared once per determinization
struct NfaIndex {
    std::vector<std::vector<int>> eps;                              // state -> eps targets
    std::vector<std::vector<std::pair<const Predicate*, int>>> guarded;  // state -> (guard, target)

    explicit NfaIndex(const Sfa& sfa) : eps(sfa.num_states), guarded(sfa.num_states) {
        for (const auto& t : sfa.transitions) {
            if (t.guard) {
                guarded[static_cast<size_t>(t.source)].emplace_back(&*t.guard, t.target);
            } else {
                eps[static_cast<size_t>(t.source)].push_back(t.target);
            }
        }
    }

    std::vector<int> closure(std::vector<int> states) const {
        std::set<int> seen(states.begin(), states.end());
        std::queue<int> todo;
        for (int s : states) todo.push(s);
        while (!todo.empty()) {
            int s = todo.front();
            todo.pop();
            for (int t : eps[static_cast<size_t>(s)]) {
                if (seen.insert(t).second) todo.push(t);
            }
        }
        return {seen.begin(), seen.end()};  // sorted canonical form
    }
};

}  // namespace

Dsfa determinize(const Sfa& sfa, const MintermSet& minterms, int state_budget) {
    const int t = minterms.size();
    NfaIndex nfa(sfa);

    // Guard truth per (guard, symbol) is independent of the subset; memoize.
    std::map<std::pair<const Predicate*, int>, bool> guard_truth;
    auto holds = [&](const Predicate* g, int symbol) {
        auto key = std::make_pair(g, symbol);
        auto it = guard_truth.find(key);
        if (it != guard_truth.end()) return it->second;
        bool v = predicate_holds_on_minterm(*g, symbol, minterms);
        guard_truth.emplace(key, v);
        return v;
    };

    std::map<std::vector<int>, int> subset_ids;
    std::vector<std::vector<int>> subsets;
    auto intern = [&](std::vector<int> subset) {
        auto it = subset_ids.find(subset);
        if (it != subset_ids.end()) return it->second;
        int id = static_cast<int>(subsets.size());
        if (id >= state_budget)
            throw_budget("determinization exceeded the state budget of " +
                         std::to_string(state_budget));
        subset_ids.emplace(subset, id);
        subsets.push_back(std::move(subset));
        return id;
    };

    Dsfa dsfa;
    dsfa.num_symbols = t;
    dsfa.start = intern(nfa.closure({sfa.start}));

    std::set<int> final_set(sfa.finals.begin(), sfa.finals.end());
    for (int id = 0; id < static_cast<int>(subsets.size()); ++id) {
        for (int symbol = 0; symbol < t; ++symbol) {
            std::vector<int> move;
            for (int s : subsets[static_cast<size_t>(id)]) {
                for (const auto& [guard, target] : nfa.guarded[static_cast<size_t>(s)]) {
                    if (holds(guard, symbol)) move.push_back(target);
                }
            }
            std::sort(move.begin(), move.end());
            move.erase(std::unique(move.begin(), move.end()), move.end());
            int target_id = intern(nfa.closure(std::move(move)));
            dsfa.table.push_back(target_id);
        }
    }

    dsfa.num_states = static_cast<int>(subsets.size());
    dsfa.final_states.resize(static_cast<size_t>(dsfa.num_states), 0);
    for (int id = 0; id < dsfa.num_states; ++id) {
        for (int s : subsets[static_cast<size_t>(id)]) {
            if (final_set.count(s)) {
                dsfa.final_states[static_cast<size_t>(id)] = 1;
                break;
            }
        }
    }
    if (dsfa.table.size() != static_cast<size_t>(dsfa.num_states) * static_cast<size_t>(t))
        throw_internal("determinization produced a ragged transition table");
    return merge_equivalent_states(dsfa);
}

// Subset construction leaves behavior-duplicate subsets (the start closure in
// particular); partition refinement collapses them so that the automaton's
// states are exactly the distinguishable behaviors.
Dsfa merge_equivalent_states(const Dsfa& dsfa) {
    const int t = dsfa.num_symbols;
    std::vector<int> cls(static_cast<size_t>(dsfa.num_states));
    for (int q = 0; q < dsfa.num_states; ++q) cls[static_cast<size_t>(q)] = dsfa.is_final(q) ? 1 : 0;

    for (;;) {
        std::map<std::vector<int>, int> signatures;
        std::vector<int> next(static_cast<size_t>(dsfa.num_states));
        for (int q = 0; q < dsfa.num_states; ++q) {
            std::vector<int> sig;
            sig.reserve(static_cast<size_t>(t) + 1);
            sig.push_back(cls[static_cast<size_t>(q)]);
            for (int s = 0; s < t; ++s) sig.push_back(cls[static_cast<size_t>(dsfa.next(q, s))]);
            auto [it, inserted] = signatures.emplace(std::move(sig), static_cast<int>(signatures.size()));
            next[static_cast<size_t>(q)] = it->second;
        }
        if (next == cls) break;
        cls = std::move(next);
    }

    // renumber classes in discovery order from the start for determinism
    std::vector<int> renumber(static_cast<size_t>(dsfa.num_states), -1);
    std::vector<int> class_rep;
    std::queue<int> todo;
    renumber[static_cast<size_t>(cls[static_cast<size_t>(dsfa.start)])] =
        static_cast<int>(class_rep.size());
    class_rep.push_back(dsfa.start);
    todo.push(dsfa.start);
    while (!todo.empty()) {
        const int q = todo.front();
        todo.pop();
        for (int s = 0; s < t; ++s) {
            const int target = dsfa.next(q, s);
            const int target_cls = cls[static_cast<size_t>(target)];
            if (renumber[static_cast<size_t>(target_cls)] < 0) {
                renumber[static_cast<size_t>(target_cls)] = static_cast<int>(class_rep.size());
                class_rep.push_back(target);
                todo.push(target);
            }
        }
    }

    Dsfa out;
    out.num_symbols = t;
    out.num_states = static_cast<int>(class_rep.size());
    out.start = renumber[static_cast<size_t>(cls[static_cast<size_t>(dsfa.start)])];
    out.final_states.assign(static_cast<size_t>(out.num_states), 0);
    out.table.resize(static_cast<size_t>(out.num_states) * static_cast<size_t>(t));
    for (int c = 0; c < out.num_states; ++c) {
        const int rep = class_rep[static_cast<size_t>(c)];
        out.final_states[static_cast<size_t>(c)] = dsfa.is_final(rep) ? 1 : 0;
        for (int s = 0; s < t; ++s) {
            out.table[static_cast<size_t>(c) * static_cast<size_t>(t) + static_cast<size_t>(s)] =
                renumber[static_cast<size_t>(cls[static_cast<size_t>(dsfa.next(rep, s))])];
        }
    }
    return out;
}

RecognitionResult recognize(const Dsfa& dsfa, const std::vector<Event>& stream,
                            const MintermSet& minterms) {
    RecognitionResult result;
    RunState run(dsfa);
    std::map<std::string, std::int64_t> local_index;
    std::int64_t global_index = 0;
    for (const Event& e : stream) {
        ++global_index;
        std::optional<int> symbol = minterms.classify(e);
        if (!symbol) {
            ++result.events_skipped;
            continue;
        }
        ++result.events_consumed;
        std::int64_t local = ++local_index[e.partition];
        int q = run.step(e.partition, *symbol);
        if (dsfa.is_final(q)) {
            result.matches_by_partition[e.partition].push_back(local);
            result.matches_global.emplace_back(e.partition, global_index);
        }
    }
    return result;
}

std::vector<std::int64_t> recognize_symbols(const Dsfa& dsfa, std::span<const int> symbols) {
    std::vector<std::int64_t> matches;
    int q = dsfa.start;
    std::int64_t index = 0;
    for (int s : symbols) {
        ++index;
        q = dsfa.next(q, s);
        if (dsfa.is_final(q)) matches.push_back(index);
    }
    return matches;
}

std::string dsfa_to_json(const Dsfa& dsfa, const MintermSet& minterms) {
    nlohmann::json j;
    j["version"] = 1;
    j["states"] = dsfa.num_states;
    j["start"] = dsfa.start;
    std::vector<int> finals;
    for (int q = 0; q < dsfa.num_states; ++q) {
        if (dsfa.is_final(q)) finals.push_back(q);
    }
    j["finals"] = finals;
    nlohmann::json alphabet = nlohmann::json::array();
    for (const auto& m : minterms.minterms()) alphabet.push_back(m.description());
    j["alphabet"] = alphabet;
    nlohmann::json table = nlohmann::json::array();
    for (int q = 0; q < dsfa.num_states; ++q) {
        nlohmann::json row = nlohmann::json::array();
        for (int s = 0; s < dsfa.num_symbols; ++s) row.push_back(dsfa.next(q, s));
        table.push_back(std::move(row));
    }
    j["table"] = std::move(table);
    return j.dump(2);
}

Dsfa dsfa_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw_config(std::string("bad automaton JSON: ") + e.what());
    }
    Dsfa dsfa;
    dsfa.num_states = j.at("states").get<int>();
    dsfa.start = j.at("start").get<int>();
    dsfa.final_states.assign(static_cast<size_t>(dsfa.num_states), 0);
    for (int q : j.at("finals")) dsfa.final_states.at(static_cast<size_t>(q)) = 1;
    const auto& table = j.at("table");
    dsfa.num_symbols = table.empty() ? 0 : static_cast<int>(table.at(0).size());
    for (const auto& row : table) {
        for (int target : row) dsfa.table.push_back(target);
    }
    if (dsfa.table.size() !=
        static_cast<size_t>(dsfa.num_states) * static_cast<size_t>(dsfa.num_symbols))
        throw_config("automaton JSON has a ragged transition table");
    return dsfa;
}

}  // namespace eventcast
