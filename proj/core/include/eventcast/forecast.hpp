#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "eventcast/embedding.hpp"

namespace eventcast {

/// P(W = n) for n = 1..h where W counts transitions until the chain first
/// enters a final state. Residual mass is the probability of not finishing
/// within the horizon.
struct WaitingTimeDistribution {
    int horizon = 0;
    std::vector<double> p;  // index 0 = P(W=1)

    double probability(int n) const { return p[static_cast<size_t>(n - 1)]; }
    double mass(int from, int to) const {
        double sum = 0.0;
        for (int n = from; n <= to; ++n) sum += probability(n);
        return sum;
    }
    double total_mass() const { return mass(1, horizon); }
    double residual() const { return 1.0 - total_mass(); }
};

/// First-passage probabilities by incremental matrix powers:
///   non-final start: p[n] = xi_N' N^(n-1) (I - N) 1
///   final start:     p[1] = xi_F' F 1,  p[n>=2] = xi_F' F_N N^(n-2) (I - N) 1
/// `state` is an embedding state id (resolved through the matrix ordering).
WaitingTimeDistribution wtd_matrix(const PartitionedMatrix& pm, int state, int horizon);

/// Same distribution straight from the tree, without building the chain:
/// frontier expansion of (automaton state, recent-context) pairs, stopping
/// paths at their first final state and pruning partial paths whose
/// probability drops below `cutoff`.
WaitingTimeDistribution wtd_pst(const Dsfa& dsfa, const PredictionSuffixTree& pst,
                                std::span<const int> context, int state, int horizon,
                                double cutoff);

enum class ForecastKind { Interval, Point, Classification, None };

struct Forecast {
    ForecastKind kind = ForecastKind::None;
    int start = -1;        // interval
    int end = -1;
    int point = -1;        // argmax
    bool positive = false; // classification
    double probability = 0.0;
};

enum class ForecastType { Interval, Point, ClassifyNextW };

struct ForecastConfig {
    double theta_fc = 0.5;  // confidence threshold
    int w = 10;             // classification window
    int horizon = 200;
    double cutoff = 1e-4;   // tree-path pruning threshold
    int max_spread = 0;     // 0 = point forecasts for the regression metrics
    ForecastType type = ForecastType::Interval;

    void validate() const {
        if (!(theta_fc >= 0.0) || !(theta_fc < 1.0))
            throw_config("theta_fc must lie in [0, 1)");
        if (horizon < 1) throw_config("horizon must be >= 1");
        if (w < 1 || w > horizon) throw_config("window w must lie in [1, horizon]");
        if (cutoff < 0.0 || cutoff >= 1.0) throw_config("cutoff must lie in [0, 1)");
    }
};

/// Smallest interval whose mass reaches theta_fc (two-pointer expand/shrink,
/// earlier-found interval kept on spread ties). When no interval attains the
/// threshold the marker (-1, -1) is returned carrying the full-horizon mass.
Forecast interval_forecast(const WaitingTimeDistribution& wtd, double theta_fc);

/// Earliest future point of maximum probability.
Forecast argmax_forecast(const WaitingTimeDistribution& wtd);

/// Positive iff the first w points hold at least theta_fc of the mass; the
/// probability field carries the sum (the ranking score for ROC curves).
Forecast classify_next_w(const WaitingTimeDistribution& wtd, int w, double theta_fc);

Forecast make_forecast(const WaitingTimeDistribution& wtd, const ForecastConfig& cfg);

/// Average waiting-time baseline: per automaton state, the mean number of
/// transitions until the next final-state entry seen during training.
class MeanBaseline {
public:
    void train(const Dsfa& dsfa, const std::vector<std::vector<int>>& symbol_sequences);

    /// Rounded mean for the state; nullopt when the state was never observed
    /// to reach a final state (no-forecast).
    std::optional<std::int64_t> forecast(int state) const;
    double raw_mean(int state) const;
    bool has_forecast(int state) const;

private:
    std::vector<double> sums_;
    std::vector<std::int64_t> counts_;
};

/// Per-embedding-state forecast lookup, evaluated once offline.
struct EmbeddingForecastTable {
    std::vector<Forecast> by_state;
    const Forecast& lookup(int state) const { return by_state[static_cast<size_t>(state)]; }
};

EmbeddingForecastTable precompute_forecast_table(const Embedding& emb,
                                                 const PartitionedMatrix& pm,
                                                 const ForecastConfig& cfg);

/// Forecast lookup for the tree-direct path, keyed by (automaton state, tree
/// node). Every (state, leaf) pair is evaluated offline; contexts shorter
/// than the tree depth (stream warm-up) fill in lazily.
class PstForecastTable {
public:
    PstForecastTable(const Dsfa* dsfa, const PredictionSuffixTree* pst, ForecastConfig cfg);

    /// Offline pass over every (state, leaf) pair.
    void precompute();

    /// O(1) after precompute; computes and caches on a miss.
    const Forecast& lookup(int state, int node, std::span<const int> context);

    size_t size() const { return table_.size(); }

private:
    const Dsfa* dsfa_;
    const PredictionSuffixTree* pst_;
    ForecastConfig cfg_;
    std::map<std::pair<int, int>, Forecast> table_;
};

}  // namespace eventcast
