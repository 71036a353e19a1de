#include "eventcast/engine.hpp"

#include <algorithm>
#include <chrono>

namespace eventcast {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

EngineMode engine_mode_from_string(const std::string& name) {
    if (name == "psa-embedding") return EngineMode::PsaEmbedding;
    if (name == "pst-direct") return EngineMode::PstDirect;
    if (name == "full-order") return EngineMode::FullOrder;
    if (name == "mean-baseline") return EngineMode::MeanBaseline;
    if (name == "iid") return EngineMode::Iid;
    throw_config("unknown engine mode '" + name + "'");
}

std::string to_string(EngineMode mode) {
    switch (mode) {
        case EngineMode::PsaEmbedding: return "psa-embedding";
        case EngineMode::PstDirect: return "pst-direct";
        case EngineMode::FullOrder: return "full-order";
        case EngineMode::MeanBaseline: return "mean-baseline";
        case EngineMode::Iid: return "iid";
    }
    return "?";
}

Engine::Engine(const Dsfa* dsfa, EngineConfig cfg) : dsfa_(dsfa), cfg_(std::move(cfg)) {
    cfg_.learn.validate();
    cfg_.forecast.validate();
}

void Engine::train(const std::vector<std::vector<int>>& sequences) {
    const int t = dsfa_->num_symbols;
    const auto model_start = Clock::now();

    if (cfg_.mode == EngineMode::MeanBaseline) {
        mean_ = std::make_unique<MeanBaseline>();
        mean_->train(*dsfa_, sequences);
        times_.model_seconds = seconds_since(model_start);
        const auto in_start = Clock::now();
        mean_forecasts_.assign(static_cast<size_t>(dsfa_->num_states), Forecast{});
        for (int q = 0; q < dsfa_->num_states; ++q) {
            Forecast fc;
            if (auto point = mean_->forecast(q)) {
                fc.kind = ForecastKind::Point;
                fc.point = static_cast<int>(*point);
                fc.start = fc.end = fc.point;
                // degenerate ranking score: inside the window or not
                fc.positive = *point <= cfg_.forecast.w;
                fc.probability = fc.positive ? 1.0 : 0.0;
            }
            mean_forecasts_[static_cast<size_t>(q)] = fc;
        }
        times_.in_seconds = seconds_since(in_start);
        return;
    }

    // order-0 keeps only the root; the other modes learn up to depth m
    LearnConfig learn = cfg_.learn;
    if (cfg_.mode == EngineMode::FullOrder) learn.full_expansion = true;

    cst_ = std::make_unique<CounterSuffixTree>(t, learn.m + 1);
    for (const auto& seq : sequences) cst_->add_sequence(seq);

    if (cfg_.mode == EngineMode::Iid) {
        pst_ = std::make_unique<PredictionSuffixTree>(t, learn.m);
        pst_->set_distribution(0, smooth(empirical_distribution(*cst_, {}), learn.alpha));
        pst_->set_count(0, cst_->total_windows());
    } else {
        pst_ = std::make_unique<PredictionSuffixTree>(learn_pst(*cst_, learn));
    }

    if (uses_embedding()) {
        psa_ = std::make_unique<Psa>(pst_to_psa(*pst_, cst_.get(), learn.n));
        embedding_ = std::make_unique<Embedding>(embed(*dsfa_, *psa_, cfg_.state_budget));
        matrix_ = std::make_unique<PartitionedMatrix>(partition_matrix(*embedding_));
        times_.model_seconds = seconds_since(model_start);

        const auto wt_start = Clock::now();
        std::vector<WaitingTimeDistribution> wtds;
        wtds.reserve(static_cast<size_t>(embedding_->num_states()));
        for (int q = 0; q < embedding_->num_states(); ++q)
            wtds.push_back(wtd_matrix(*matrix_, q, cfg_.forecast.horizon));
        times_.wt_seconds = seconds_since(wt_start);

        const auto in_start = Clock::now();
        embedding_table_ = std::make_unique<EmbeddingForecastTable>();
        embedding_table_->by_state.reserve(wtds.size());
        for (const auto& wtd : wtds)
            embedding_table_->by_state.push_back(make_forecast(wtd, cfg_.forecast));
        times_.in_seconds = seconds_since(in_start);
        return;
    }

    // tree-direct path
    times_.model_seconds = seconds_since(model_start);
    const auto wt_start = Clock::now();
    pst_table_ = std::make_unique<PstForecastTable>(dsfa_, pst_.get(), cfg_.forecast);
    pst_table_->precompute();
    // the table fuses distribution estimation with forecast extraction; the
    // extraction share is negligible next to the path expansion
    times_.wt_seconds = seconds_since(wt_start);
}

Engine::StepResult Engine::step(const std::string& partition, int symbol) {
    StepResult result;
    auto& run = runs_[partition];

    if (cfg_.mode == EngineMode::MeanBaseline) {
        if (run.dsfa_state < 0) run.dsfa_state = dsfa_->start;
        run.dsfa_state = dsfa_->next(run.dsfa_state, symbol);
        result.dsfa_state = run.dsfa_state;
        result.match = dsfa_->is_final(run.dsfa_state);
        const Forecast& fc = mean_forecasts_[static_cast<size_t>(run.dsfa_state)];
        if (fc.kind != ForecastKind::None) {
            result.forecast = &fc;
            result.has_score = true;
            result.score = fc.probability;
        }
        return result;
    }

    if (cfg_.mode == EngineMode::PstDirect) {
        if (run.dsfa_state < 0) run.dsfa_state = dsfa_->start;
        run.dsfa_state = dsfa_->next(run.dsfa_state, symbol);
        run.context.push_back(symbol);
        while (static_cast<int>(run.context.size()) > pst_->max_depth()) run.context.pop_front();
        result.dsfa_state = run.dsfa_state;
        result.match = dsfa_->is_final(run.dsfa_state);

        const std::vector<int> context(run.context.begin(), run.context.end());
        const int node = pst_->lookup(context);
        const Forecast& fc = pst_table_->lookup(run.dsfa_state, node, context);
        result.forecast = &fc;
        if (cfg_.forecast.type == ForecastType::ClassifyNextW) {
            result.has_score = true;
            result.score = fc.probability;
        }
        return result;
    }

    // embedding modes: wait until the buffered suffix matches a start label
    run.context.push_back(symbol);
    while (static_cast<int>(run.context.size()) > std::max(1, cfg_.learn.m)) run.context.pop_front();
    if (!run.active) {
        const std::vector<int> buffer(run.context.begin(), run.context.end());
        for (size_t s = 0; s < embedding_->start_labels.size(); ++s) {
            const auto& label = embedding_->start_labels[s];
            if (label.size() > buffer.size()) continue;
            if (std::equal(label.begin(), label.end(), buffer.end() - static_cast<long>(label.size()))) {
                run.active = true;
                run.embedding_state = embedding_->starts[s];
                break;
            }
        }
        if (!run.active) return result;  // still waiting
    } else {
        run.embedding_state = embedding_->next(run.embedding_state, symbol);
    }

    result.dsfa_state = embedding_->dsfa_state(run.embedding_state);
    result.match = embedding_->is_final(run.embedding_state);
    const Forecast& fc = embedding_table_->lookup(run.embedding_state);
    result.forecast = &fc;
    if (cfg_.forecast.type == ForecastType::ClassifyNextW) {
        result.has_score = true;
        result.score = fc.probability;
    }
    return result;
}

void Engine::reset_runs() { runs_.clear(); }

std::optional<WaitingTimeDistribution> Engine::current_wtd(const std::string& partition) const {
    auto it = runs_.find(partition);
    if (it == runs_.end()) return std::nullopt;
    const PartitionRun& run = it->second;
    if (uses_embedding()) {
        if (!run.active) return std::nullopt;
        return wtd_matrix(*matrix_, run.embedding_state, cfg_.forecast.horizon);
    }
    if (cfg_.mode == EngineMode::PstDirect) {
        if (run.dsfa_state < 0) return std::nullopt;
        const std::vector<int> context(run.context.begin(), run.context.end());
        return wtd_pst(*dsfa_, *pst_, context, run.dsfa_state, cfg_.forecast.horizon,
                       cfg_.forecast.cutoff);
    }
    return std::nullopt;
}

}  // namespace eventcast
