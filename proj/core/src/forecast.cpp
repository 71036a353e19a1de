#include "eventcast/forecast.hpp"

#include <algorithm>
#include <cmath>

namespace eventcast {

namespace {

// u <- N' u over the non-final block
void left_multiply_n(const PartitionedMatrix& pm, std::vector<double>& u) {
    const int n = pm.num_non_final;
    std::vector<double> next(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double ui = u[static_cast<size_t>(i)];
        if (ui == 0.0) continue;
        const size_t row = static_cast<size_t>(i) * static_cast<size_t>(pm.size());
        for (int j = 0; j < n; ++j) next[static_cast<size_t>(j)] += ui * pm.pi[row + static_cast<size_t>(j)];
    }
    u = std::move(next);
}

}  // namespace

WaitingTimeDistribution wtd_matrix(const PartitionedMatrix& pm, int state, int horizon) {
    if (horizon < 1) throw_config("horizon must be >= 1");
    if (state < 0 || state >= static_cast<int>(pm.matrix_index.size()))
        throw_config("state is not indexed in the partitioned matrix");
    const int n = pm.num_non_final;
    const int f = pm.num_final;
    const int row = pm.matrix_index[static_cast<size_t>(state)];

    WaitingTimeDistribution wtd;
    wtd.horizon = horizon;
    wtd.p.assign(static_cast<size_t>(horizon), 0.0);

    // exit vector (I - N) 1: per non-final state, the one-step probability of
    // entering any final state
    std::vector<double> exit(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double stay = 0.0;
        const size_t r = static_cast<size_t>(i) * static_cast<size_t>(pm.size());
        for (int j = 0; j < n; ++j) stay += pm.pi[r + static_cast<size_t>(j)];
        exit[static_cast<size_t>(i)] = 1.0 - stay;
    }
    auto dot_exit = [&](const std::vector<double>& u) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += u[static_cast<size_t>(i)] * exit[static_cast<size_t>(i)];
        return sum;
    };

    if (row < n) {
        // xi_N' N^(n-1) (I - N) 1 with the power built incrementally
        std::vector<double> u(static_cast<size_t>(n), 0.0);
        u[static_cast<size_t>(row)] = 1.0;
        wtd.p[0] = dot_exit(u);
        for (int step = 2; step <= horizon; ++step) {
            left_multiply_n(pm, u);
            wtd.p[static_cast<size_t>(step - 1)] = dot_exit(u);
        }
        return wtd;
    }

    // final start: p[1] = xi_F' F 1, then the first transition must leave to N
    const size_t r = static_cast<size_t>(row) * static_cast<size_t>(pm.size());
    double back = 0.0;
    for (int j = 0; j < f; ++j) back += pm.pi[r + static_cast<size_t>(n + j)];
    wtd.p[0] = back;
    if (horizon == 1) return wtd;

    std::vector<double> u(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) u[static_cast<size_t>(j)] = pm.pi[r + static_cast<size_t>(j)];
    wtd.p[1] = dot_exit(u);
    for (int step = 3; step <= horizon; ++step) {
        left_multiply_n(pm, u);
        wtd.p[static_cast<size_t>(step - 1)] = dot_exit(u);
    }
    return wtd;
}

WaitingTimeDistribution wtd_pst(const Dsfa& dsfa, const PredictionSuffixTree& pst,
                                std::span<const int> context, int state, int horizon,
                                double cutoff) {
    if (horizon < 1) throw_config("horizon must be >= 1");
    if (cutoff < 0.0 || cutoff >= 1.0) throw_config("cutoff must lie in [0, 1)");
    const int t = dsfa.num_symbols;
    const size_t m = static_cast<size_t>(pst.max_depth());

    WaitingTimeDistribution wtd;
    wtd.horizon = horizon;
    wtd.p.assign(static_cast<size_t>(horizon), 0.0);

    std::vector<int> start_ctx(context.begin(), context.end());
    if (start_ctx.size() > m) start_ctx.erase(start_ctx.begin(), start_ctx.end() - static_cast<long>(m));

    // frontier of (state, recent context) with merged path probabilities
    std::map<std::pair<int, std::vector<int>>, double> frontier;
    frontier[{state, std::move(start_ctx)}] = 1.0;

    for (int depth = 1; depth <= horizon && !frontier.empty(); ++depth) {
        std::map<std::pair<int, std::vector<int>>, double> next;
        double reached = 0.0;
        for (const auto& [key, prob] : frontier) {
            const auto& [q, ctx] = key;
            const auto& dist = pst.distribution(pst.lookup(ctx));
            for (int sigma = 0; sigma < t; ++sigma) {
                const double p = prob * dist[static_cast<size_t>(sigma)];
                if (p <= 0.0) continue;
                const int q_next = dsfa.next(q, sigma);
                if (dsfa.is_final(q_next)) {
                    // first entry; paths beyond a final state are not useful
                    reached += p;
                    continue;
                }
                std::vector<int> ctx_next = ctx;
                ctx_next.push_back(sigma);
                if (ctx_next.size() > m)
                    ctx_next.erase(ctx_next.begin(), ctx_next.end() - static_cast<long>(m));
                next[{q_next, std::move(ctx_next)}] += p;
            }
        }
        wtd.p[static_cast<size_t>(depth - 1)] = reached;
        if (cutoff > 0.0) {
            for (auto it = next.begin(); it != next.end();) {
                if (it->second < cutoff) it = next.erase(it);
                else ++it;
            }
        }
        frontier = std::move(next);
    }
    return wtd;
}

Forecast interval_forecast(const WaitingTimeDistribution& wtd, double theta_fc) {
    if (!(theta_fc < 1.0)) throw_config("theta_fc must be below 1");
    const int h = wtd.horizon;
    int best_s = -1, best_e = -1;
    double best_mass = 0.0;
    double window = 0.0;
    int i = 1;
    for (int j = 1; j <= h; ++j) {
        window += wtd.probability(j);
        while (i < j && window - wtd.probability(i) >= theta_fc) {
            window -= wtd.probability(i);
            ++i;
        }
        if (window >= theta_fc && (best_s < 0 || (j - i) < (best_e - best_s))) {
            best_s = i;
            best_e = j;
            best_mass = window;
        }
    }
    Forecast fc;
    if (best_s < 0) {
        fc.kind = ForecastKind::None;  // threshold unattainable within the horizon
        fc.probability = wtd.total_mass();
        return fc;
    }
    fc.kind = ForecastKind::Interval;
    fc.start = best_s;
    fc.end = best_e;
    fc.probability = best_mass;
    return fc;
}

Forecast argmax_forecast(const WaitingTimeDistribution& wtd) {
    int best = 1;
    for (int n = 2; n <= wtd.horizon; ++n) {
        if (wtd.probability(n) > wtd.probability(best)) best = n;
    }
    Forecast fc;
    fc.kind = ForecastKind::Point;
    fc.point = best;
    fc.start = fc.end = best;
    fc.probability = wtd.probability(best);
    return fc;
}

Forecast classify_next_w(const WaitingTimeDistribution& wtd, int w, double theta_fc) {
    if (w < 1 || w > wtd.horizon) throw_config("window w must lie in [1, horizon]");
    const double score = wtd.mass(1, w);
    Forecast fc;
    fc.kind = ForecastKind::Classification;
    fc.positive = score >= theta_fc;
    fc.probability = score;
    return fc;
}

Forecast make_forecast(const WaitingTimeDistribution& wtd, const ForecastConfig& cfg) {
    switch (cfg.type) {
        case ForecastType::Interval: return interval_forecast(wtd, cfg.theta_fc);
        case ForecastType::Point: return argmax_forecast(wtd);
        case ForecastType::ClassifyNextW: return classify_next_w(wtd, cfg.w, cfg.theta_fc);
    }
    throw_internal("unknown forecast type");
}

void MeanBaseline::train(const Dsfa& dsfa, const std::vector<std::vector<int>>& symbol_sequences) {
    sums_.assign(static_cast<size_t>(dsfa.num_states), 0.0);
    counts_.assign(static_cast<size_t>(dsfa.num_states), 0);
    for (const auto& seq : symbol_sequences) {
        // states visited along the run, including the start visit
        std::vector<int> visited;
        visited.reserve(seq.size() + 1);
        int q = dsfa.start;
        visited.push_back(q);
        for (int s : seq) {
            q = dsfa.next(q, s);
            visited.push_back(q);
        }
        // walk backwards tracking the next final-state entry
        std::int64_t next_final = -1;
        for (std::int64_t i = static_cast<std::int64_t>(visited.size()) - 1; i >= 0; --i) {
            if (next_final >= 0 && i < next_final) {
                sums_[static_cast<size_t>(visited[static_cast<size_t>(i)])] +=
                    static_cast<double>(next_final - i);
                ++counts_[static_cast<size_t>(visited[static_cast<size_t>(i)])];
            }
            if (i > 0 && dsfa.is_final(visited[static_cast<size_t>(i)])) next_final = i;
        }
    }
}

bool MeanBaseline::has_forecast(int state) const {
    return state >= 0 && state < static_cast<int>(counts_.size()) &&
           counts_[static_cast<size_t>(state)] > 0;
}

double MeanBaseline::raw_mean(int state) const {
    if (!has_forecast(state)) throw_config("state never observed to reach a final state");
    return sums_[static_cast<size_t>(state)] /
           static_cast<double>(counts_[static_cast<size_t>(state)]);
}

std::optional<std::int64_t> MeanBaseline::forecast(int state) const {
    if (!has_forecast(state)) return std::nullopt;
    return std::llround(raw_mean(state));
}

EmbeddingForecastTable precompute_forecast_table(const Embedding& emb,
                                                 const PartitionedMatrix& pm,
                                                 const ForecastConfig& cfg) {
    cfg.validate();
    EmbeddingForecastTable table;
    table.by_state.reserve(static_cast<size_t>(emb.num_states()));
    for (int q = 0; q < emb.num_states(); ++q) {
        table.by_state.push_back(make_forecast(wtd_matrix(pm, q, cfg.horizon), cfg));
    }
    return table;
}

PstForecastTable::PstForecastTable(const Dsfa* dsfa, const PredictionSuffixTree* pst,
                                   ForecastConfig cfg)
    : dsfa_(dsfa), pst_(pst), cfg_(std::move(cfg)) {
    cfg_.validate();
}

void PstForecastTable::precompute() {
    for (int q = 0; q < dsfa_->num_states; ++q) {
        for (int leaf : pst_->leaves()) {
            const auto label = pst_->label(leaf);
            table_.emplace(std::make_pair(q, leaf),
                           make_forecast(wtd_pst(*dsfa_, *pst_, label, q, cfg_.horizon,
                                                 cfg_.cutoff),
                                         cfg_));
        }
    }
}

const Forecast& PstForecastTable::lookup(int state, int node, std::span<const int> context) {
    const auto key = std::make_pair(state, node);
    auto it = table_.find(key);
    if (it == table_.end()) {
        it = table_
                 .emplace(key, make_forecast(wtd_pst(*dsfa_, *pst_, context, state, cfg_.horizon,
                                                     cfg_.cutoff),
                                             cfg_))
                 .first;
    }
    return it->second;
}

}  // namespace eventcast
