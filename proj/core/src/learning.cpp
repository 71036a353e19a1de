#include "eventcast/learning.hpp"

#include <algorithm>
#include <cmath>

namespace eventcast {

// ---------------------------------------------------------------------------
// counter suffix tree

CounterSuffixTree::CounterSuffixTree(int alphabet_size, int depth)
    : alphabet_size_(alphabet_size), depth_(depth) {
    if (alphabet_size < 1) throw_config("alphabet must be non-empty");
    if (depth < 1) throw_config("counter suffix tree depth must be >= 1");
    nodes_.push_back(Node{0, std::vector<int>(static_cast<size_t>(alphabet_size), -1)});
}

void CounterSuffixTree::add_sequence(std::span<const int> symbols) {
    const int k = static_cast<int>(symbols.size());
    for (int end = depth_ - 1; end < k; ++end) {
        // window symbols[end-depth+1 .. end], fed most recent first
        int node = 0;
        for (int i = 0; i < depth_; ++i) {
            const int symbol = symbols[static_cast<size_t>(end - i)];
            if (symbol < 0 || symbol >= alphabet_size_)
                throw_config("symbol out of range while building the counter suffix tree");
            int& slot = nodes_[static_cast<size_t>(node)].children[static_cast<size_t>(symbol)];
            if (slot < 0) {
                slot = static_cast<int>(nodes_.size());
                nodes_.push_back(
                    Node{0, std::vector<int>(static_cast<size_t>(alphabet_size_), -1)});
            }
            node = slot;
            ++nodes_[static_cast<size_t>(node)].counter;
        }
        ++windows_;
    }
}

int CounterSuffixTree::node_for(std::span<const int> s) const {
    int node = 0;
    for (size_t i = s.size(); i-- > 0;) {
        if (s[i] < 0 || s[i] >= alphabet_size_) return -1;
        node = nodes_[static_cast<size_t>(node)].children[static_cast<size_t>(s[i])];
        if (node < 0) return -1;
    }
    return node;
}

std::int64_t CounterSuffixTree::count(std::span<const int> s) const {
    if (static_cast<int>(s.size()) > depth_)
        throw_config("queried string is longer than the counter suffix tree depth");
    const int node = node_for(s);
    return node < 0 ? 0 : nodes_[static_cast<size_t>(node)].counter;
}

std::vector<std::int64_t> CounterSuffixTree::successor_counts(std::span<const int> s) const {
    if (static_cast<int>(s.size()) + 1 > depth_)
        throw_config("successor query exceeds the counter suffix tree depth");
    std::vector<std::int64_t> out(static_cast<size_t>(alphabet_size_), 0);
    // s . sigma starts its reversed path at sigma, so walk per successor.
    std::vector<int> extended(s.size() + 1);
    std::copy(s.begin(), s.end(), extended.begin());
    for (int sigma = 0; sigma < alphabet_size_; ++sigma) {
        extended.back() = sigma;
        const int node = node_for(extended);
        if (node >= 0) out[static_cast<size_t>(sigma)] = nodes_[static_cast<size_t>(node)].counter;
    }
    return out;
}

void CounterSuffixTree::visit_contexts(
    int length, const std::function<void(const std::vector<int>&, std::int64_t)>& fn) const {
    if (length < 1 || length > depth_) return;
    // DFS over reversed paths; the context is the reversed path.
    std::vector<int> path;  // most recent first
    std::function<void(int)> walk = [&](int node) {
        if (static_cast<int>(path.size()) == length) {
            std::vector<int> context(path.rbegin(), path.rend());
            fn(context, nodes_[static_cast<size_t>(node)].counter);
            return;
        }
        const auto& children = nodes_[static_cast<size_t>(node)].children;
        for (int sigma = 0; sigma < alphabet_size_; ++sigma) {
            const int child = children[static_cast<size_t>(sigma)];
            if (child >= 0) {
                path.push_back(sigma);
                walk(child);
                path.pop_back();
            }
        }
    };
    walk(0);
}

std::int64_t CounterSuffixTree::level_sum(int level) const {
    std::int64_t sum = 0;
    std::function<void(int, int)> walk = [&](int node, int depth) {
        if (depth == level) {
            sum += nodes_[static_cast<size_t>(node)].counter;
            return;
        }
        for (int child : nodes_[static_cast<size_t>(node)].children) {
            if (child >= 0) walk(child, depth + 1);
        }
    };
    walk(0, 0);
    return sum;
}

CounterSuffixTree cst_build(std::span<const int> symbols, int m, int alphabet_size) {
    if (m < 1) throw_config("counter suffix tree order must be >= 1");
    CounterSuffixTree cst(alphabet_size, m);
    cst.add_sequence(symbols);
    return cst;
}

double empirical_prob(const CounterSuffixTree& cst, std::span<const int> context, int symbol) {
    const auto counts = cst.successor_counts(context);
    std::int64_t denom = 0;
    for (std::int64_t c : counts) denom += c;
    if (denom == 0) return 1.0 / cst.alphabet_size();
    return static_cast<double>(counts[static_cast<size_t>(symbol)]) / static_cast<double>(denom);
}

std::vector<double> empirical_distribution(const CounterSuffixTree& cst,
                                           std::span<const int> context) {
    const auto counts = cst.successor_counts(context);
    std::int64_t denom = 0;
    for (std::int64_t c : counts) denom += c;
    std::vector<double> dist(counts.size());
    if (denom == 0) {
        std::fill(dist.begin(), dist.end(), 1.0 / static_cast<double>(counts.size()));
        return dist;
    }
    for (size_t i = 0; i < counts.size(); ++i)
        dist[i] = static_cast<double>(counts[i]) / static_cast<double>(denom);
    return dist;
}

// ---------------------------------------------------------------------------
// prediction suffix tree

PredictionSuffixTree::PredictionSuffixTree(int alphabet_size, int max_depth)
    : alphabet_size_(alphabet_size), max_depth_(max_depth) {
    Node root;
    root.children.assign(static_cast<size_t>(alphabet_size), -1);
    root.gamma.assign(static_cast<size_t>(alphabet_size),
                      1.0 / static_cast<double>(alphabet_size));
    nodes_.push_back(std::move(root));
}

int PredictionSuffixTree::child(int node, int symbol) const {
    return nodes_[static_cast<size_t>(node)].children[static_cast<size_t>(symbol)];
}

bool PredictionSuffixTree::is_leaf(int node) const {
    for (int c : nodes_[static_cast<size_t>(node)].children)
        if (c >= 0) return false;
    return true;
}

int PredictionSuffixTree::node_depth(int node) const {
    int d = 0;
    while (nodes_[static_cast<size_t>(node)].parent >= 0) {
        node = nodes_[static_cast<size_t>(node)].parent;
        ++d;
    }
    return d;
}

std::vector<int> PredictionSuffixTree::label(int node) const {
    // the edge symbol is the symbol prepended to the parent's context, so
    // walking up reads the label in natural order
    std::vector<int> out;
    while (nodes_[static_cast<size_t>(node)].parent >= 0) {
        out.push_back(nodes_[static_cast<size_t>(node)].symbol);
        node = nodes_[static_cast<size_t>(node)].parent;
    }
    return out;
}

const std::vector<double>& PredictionSuffixTree::distribution(int node) const {
    return nodes_[static_cast<size_t>(node)].gamma;
}

int PredictionSuffixTree::lookup(std::span<const int> context) const {
    int node = 0;
    for (size_t i = context.size(); i-- > 0;) {
        const int next = nodes_[static_cast<size_t>(node)].children[static_cast<size_t>(context[i])];
        if (next < 0) break;
        node = next;
    }
    return node;
}

std::vector<int> PredictionSuffixTree::leaves() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        if (is_leaf(i)) out.push_back(i);
    }
    return out;
}

int PredictionSuffixTree::ensure_node(std::span<const int> context) {
    int node = 0;
    for (size_t i = context.size(); i-- > 0;) {
        const int symbol = context[i];
        int& slot = nodes_[static_cast<size_t>(node)].children[static_cast<size_t>(symbol)];
        if (slot < 0) {
            Node fresh;
            fresh.parent = node;
            fresh.symbol = symbol;
            fresh.children.assign(static_cast<size_t>(alphabet_size_), -1);
            fresh.gamma = nodes_[static_cast<size_t>(node)].gamma;  // placeholder until set
            slot = static_cast<int>(nodes_.size());
            nodes_.push_back(std::move(fresh));
            node = static_cast<int>(nodes_.size()) - 1;
        } else {
            node = slot;
        }
    }
    return node;
}

void PredictionSuffixTree::set_distribution(int node, std::vector<double> gamma) {
    nodes_[static_cast<size_t>(node)].gamma = std::move(gamma);
}

void PredictionSuffixTree::set_count(int node, std::int64_t count) {
    nodes_[static_cast<size_t>(node)].count = count;
}

void PredictionSuffixTree::complete_siblings(
    const std::function<std::pair<std::vector<double>, std::int64_t>(const std::vector<int>&)>&
        fill) {
    // children created here are leaves; no cascade
    for (int node = 0; node < static_cast<int>(nodes_.size()); ++node) {
        bool internal = false;
        for (int c : nodes_[static_cast<size_t>(node)].children) {
            if (c >= 0) {
                internal = true;
                break;
            }
        }
        if (!internal) continue;
        for (int sigma = 0; sigma < alphabet_size_; ++sigma) {
            if (nodes_[static_cast<size_t>(node)].children[static_cast<size_t>(sigma)] >= 0)
                continue;
            std::vector<int> context = label(node);
            context.insert(context.begin(), sigma);
            auto [gamma, count] = fill(context);
            Node fresh;
            fresh.parent = node;
            fresh.symbol = sigma;
            fresh.children.assign(static_cast<size_t>(alphabet_size_), -1);
            fresh.gamma = std::move(gamma);
            fresh.count = count;
            nodes_[static_cast<size_t>(node)].children[static_cast<size_t>(sigma)] =
                static_cast<int>(nodes_.size());
            nodes_.push_back(std::move(fresh));
        }
    }
}

// ---------------------------------------------------------------------------
// learning

bool expansion_worthwhile(std::span<const double> dist, std::span<const double> parent_dist,
                          double theta1, double theta2) {
    for (size_t sigma = 0; sigma < dist.size(); ++sigma) {
        if (!(dist[sigma] > theta1)) continue;
        const double parent_p = parent_dist[sigma];
        if (parent_p <= 0.0) return true;  // conditional appears only with the longer context
        const double ratio = dist[sigma] / parent_p;
        if (ratio > theta2 || ratio < 1.0 / theta2) return true;
    }
    return false;
}

PredictionSuffixTree learn_pst(const CounterSuffixTree& cst, const LearnConfig& cfg) {
    cfg.validate();
    const int t = cst.alphabet_size();
    if (cst.depth() < cfg.m + 1)
        throw_config("counter suffix tree depth must be at least m + 1 for learning");

    PredictionSuffixTree pst(t, cfg.m);
    pst.set_distribution(0, smooth(empirical_distribution(cst, {}), cfg.alpha));
    pst.set_count(0, cst.total_windows());

    // Candidate contexts swept breadth-first by length.
    std::vector<std::vector<int>> retained;
    for (int depth = 1; depth <= cfg.m; ++depth) {
        cst.visit_contexts(depth, [&](const std::vector<int>& context, std::int64_t count) {
            if (count <= 0) return;
            if (cfg.full_expansion) {
                retained.push_back(context);
                return;
            }
            const auto dist = empirical_distribution(cst, context);
            std::int64_t denom = 0;
            for (std::int64_t c : cst.successor_counts(context)) denom += c;
            if (denom == 0) return;  // no successor evidence inside any window
            const std::span<const int> suffix(context.data() + 1, context.size() - 1);
            const auto parent_dist = empirical_distribution(cst, suffix);
            if (expansion_worthwhile(dist, parent_dist, cfg.theta1, cfg.theta2))
                retained.push_back(context);
        });
    }

    // visit_contexts is lexicographic per depth and depths ascend, so node
    // creation order is deterministic
    for (const auto& context : retained) {
        int node = pst.ensure_node(context);
        pst.set_distribution(node, smooth(empirical_distribution(cst, context), cfg.alpha));
        pst.set_count(node, cst.count(context));
        // ancestors created on the way down also need their real statistics
        std::span<const int> span(context);
        for (size_t drop = 1; drop < context.size(); ++drop) {
            const auto suffix = span.subspan(drop);
            int anc = pst.lookup(suffix);
            if (static_cast<size_t>(pst.node_depth(anc)) == suffix.size()) {
                pst.set_distribution(anc, smooth(empirical_distribution(cst, suffix), cfg.alpha));
                pst.set_count(anc, cst.count(suffix));
            }
        }
    }

    pst.complete_siblings([&](const std::vector<int>& context) {
        return std::make_pair(smooth(empirical_distribution(cst, context), cfg.alpha),
                              cst.count(context));
    });
    return pst;
}

const std::vector<double>& pst_predict(const PredictionSuffixTree& pst,
                                       std::span<const int> context) {
    return pst.distribution(pst.lookup(context));
}

std::vector<double> smooth(std::vector<double> dist, double alpha) {
    const size_t t = dist.size();
    if (t == 0) return dist;
    const double floor = alpha / static_cast<double>(t);
    if (floor < 0.0 || floor >= 1.0 / static_cast<double>(t))
        throw_config("smoothing floor must lie in [0, 1/|alphabet|)");
    if (floor == 0.0) return dist;

    double deficit = 0.0;
    double surplus = 0.0;
    for (double p : dist) {
        if (p < floor) deficit += floor - p;
        else surplus += p - floor;
    }
    if (deficit == 0.0) return dist;
    for (double& p : dist) {
        if (p < floor) p = floor;
        else p -= deficit * (p - floor) / surplus;
    }
    return dist;
}

double avg_log_loss(const PredictionSuffixTree& pst, std::span<const int> test) {
    return avg_log_loss(pst, std::vector<std::vector<int>>{
                                 std::vector<int>(test.begin(), test.end())});
}

double avg_log_loss(const PredictionSuffixTree& pst,
                    const std::vector<std::vector<int>>& sequences) {
    const int m = pst.max_depth();
    double total = 0.0;
    std::int64_t positions = 0;
    for (const auto& seq : sequences) {
        for (size_t i = 0; i < seq.size(); ++i) {
            const size_t from = i > static_cast<size_t>(m) ? i - static_cast<size_t>(m) : 0;
            const std::span<const int> context(seq.data() + from, i - from);
            const double p = pst_predict(pst, context)[static_cast<size_t>(seq[i])];
            if (!(p > 0.0))
                throw_internal("zero-probability event in log-loss; smoothing floor is zero");
            total -= std::log2(p);
            ++positions;
        }
    }
    if (positions == 0) throw_config("log-loss needs a non-empty test sequence");
    return total / static_cast<double>(positions);
}

}  // namespace eventcast
