#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eventcast/forecast.hpp"

namespace eventcast {

enum class EngineMode {
    PsaEmbedding,  // variable-order model, suffix automaton merged into the pattern automaton
    PstDirect,     // variable-order model, tree traversed directly
    FullOrder,     // every observed context up to depth m (classic full-order chain)
    MeanBaseline,  // average waiting time per automaton state
    Iid,           // order-0: a single-state suffix automaton
};

EngineMode engine_mode_from_string(const std::string& name);
std::string to_string(EngineMode mode);

struct EngineConfig {
    EngineMode mode = EngineMode::PsaEmbedding;
    LearnConfig learn;
    ForecastConfig forecast;
    int state_budget = kDefaultStateBudget;
};

/// Wall-clock training breakdown, one field per pipeline stage.
struct TrainingTimes {
    double model_seconds = 0.0;  // counters, tree, suffix automaton, embedding
    double wt_seconds = 0.0;     // waiting-time distributions for all states
    double in_seconds = 0.0;     // forecasts extracted from the distributions
    double extra_seconds = 0.0;  // pattern automaton determinization

    double total() const { return model_seconds + wt_seconds + in_seconds + extra_seconds; }
};

/// One trained forecasting engine over a fixed pattern automaton. Streaming
/// state is held per partition; forecasts come from tables precomputed at
/// training time.
class Engine {
public:
    Engine(const Dsfa* dsfa, EngineConfig cfg);

    /// Trains the configured model on per-partition symbol sequences and
    /// precomputes the forecast tables.
    void train(const std::vector<std::vector<int>>& sequences);

    struct StepResult {
        int dsfa_state = -1;           // -1 while the embedding run is still waiting
        bool match = false;            // pattern automaton entered a final state
        const Forecast* forecast = nullptr;  // nullptr when none is available
        bool has_score = false;
        double score = 0.0;            // classification ranking score
    };

    StepResult step(const std::string& partition, int symbol);
    void reset_runs();

    /// Distribution for the partition's current state; nullopt while waiting
    /// or for the mean baseline.
    std::optional<WaitingTimeDistribution> current_wtd(const std::string& partition) const;

    const Dsfa& dsfa() const { return *dsfa_; }
    const EngineConfig& config() const { return cfg_; }
    EngineMode mode() const { return cfg_.mode; }
    const PredictionSuffixTree* pst() const { return pst_.get(); }
    const Psa* psa() const { return psa_.get(); }
    const Embedding* embedding() const { return embedding_.get(); }
    const MeanBaseline* mean_baseline() const { return mean_.get(); }
    TrainingTimes& times() { return times_; }
    const TrainingTimes& times() const { return times_; }

private:
    struct PartitionRun {
        bool active = false;           // embedding modes start in the wait phase
        int embedding_state = -1;
        int dsfa_state = -1;
        std::deque<int> context;       // last <= m symbols
    };

    bool uses_embedding() const {
        return cfg_.mode == EngineMode::PsaEmbedding || cfg_.mode == EngineMode::FullOrder ||
               cfg_.mode == EngineMode::Iid;
    }

    const Dsfa* dsfa_;
    EngineConfig cfg_;

    std::unique_ptr<CounterSuffixTree> cst_;
    std::unique_ptr<PredictionSuffixTree> pst_;
    std::unique_ptr<Psa> psa_;
    std::unique_ptr<Embedding> embedding_;
    std::unique_ptr<PartitionedMatrix> matrix_;
    std::unique_ptr<EmbeddingForecastTable> embedding_table_;
    std::unique_ptr<PstForecastTable> pst_table_;
    std::unique_ptr<MeanBaseline> mean_;
    std::vector<Forecast> mean_forecasts_;

    std::map<std::string, PartitionRun> runs_;
    TrainingTimes times_;
};

}  // namespace eventcast
