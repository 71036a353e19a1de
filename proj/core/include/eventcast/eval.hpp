#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eventcast/engine.hpp"

namespace eventcast {

/// Positions d events before each detected match, the stream points where a
/// regression forecast is scored. A match whose predecessor match lies
/// closer than d gets no checkpoint, and neither does a match within the
/// first d events.
std::vector<std::int64_t> regression_checkpoint_positions(
    const std::vector<std::int64_t>& matches, std::int64_t d);

double rmse(const std::vector<double>& forecasts, const std::vector<double>& actuals);
double mae(const std::vector<double>& forecasts, const std::vector<double>& actuals);

/// Negatively oriented interval score for one forecast (l, u) produced at
/// confidence 1 - a against the observation y. Infinite when a = 0 and the
/// observation escapes the interval.
double nois(double lower, double upper, double y, double a);
double anois(const std::vector<double>& scores);

/// Normalized shortest-walk distance from every automaton state to a final
/// state: finals are 0, the farthest state(s) are 1. States that cannot
/// reach a final state are excluded (flag vector). Errors when the start
/// cannot reach any final state.
struct StateDistances {
    std::vector<double> fraction;   // meaningful where reachable
    std::vector<char> reachable;
    int max_steps = 0;
    std::int64_t excluded = 0;

    bool in_range(int state, double lo, double hi) const {
        if (state < 0 || !reachable[static_cast<size_t>(state)]) return false;
        const double f = fraction[static_cast<size_t>(state)];
        return f >= lo && f <= hi;
    }
};

StateDistances state_expected_distance(const Dsfa& dsfa);

struct RocPoint {
    double theta = 0.0;
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;       // sensitivity / true positive rate
    double specificity = 0.0;  // true negative rate
};

struct ClassificationReport {
    bool valid = false;
    std::int64_t checkpoints = 0;
    std::int64_t positives = 0;  // ground-truth positive labels
    std::vector<RocPoint> roc;
    double auc = 0.0;
};

/// Evenly spaced thresholds 0.00 .. 1.00.
std::vector<double> default_theta_grid(int points = 101);

/// Scored (ranking score, ground-truth label) pairs -> confusion counts per
/// threshold, ROC and trapezoid AUC.
ClassificationReport score_classification(const std::vector<std::pair<double, bool>>& scored,
                                          const std::vector<double>& thetas);

/// Pairwise-ranking AUC: P(score_pos > score_neg) + 0.5 P(equal). The
/// independent cross-check for the trapezoid integration.
double auc_pairwise(const std::vector<std::pair<double, bool>>& scored);

/// Streams the test sequences through the engine; states whose expected
/// distance falls in [lo, hi] emit a CLASSIFICATION-NEXTW score, labeled by
/// whether a match really occurs within the next w events of the partition.
ClassificationReport classification_run(Engine& engine,
                                        const std::map<std::string, std::vector<int>>& sequences,
                                        double distance_lo, double distance_hi, int w,
                                        const std::vector<double>& thetas);

struct RegressionReport {
    bool valid = false;
    std::int64_t checkpoints = 0;
    std::int64_t no_forecast = 0;  // marker forecasts, excluded from the averages
    double rmse = 0.0;
    double mae = 0.0;
    double anois = 0.0;
};

/// Point (argmax) forecasts d events before each match, scored with RMSE and
/// MAE; interval forecasts at theta_fc scored with ANOIS.
RegressionReport regression_run(Engine& engine,
                                const std::map<std::string, std::vector<int>>& sequences,
                                std::int64_t d, double theta_fc);

struct ThroughputReport {
    bool valid = false;
    std::int64_t events = 0;
    double seconds = 0.0;
    double events_per_second = 0.0;
};

/// Wall-clock event rate of the engine on pre-classified streams; one
/// untimed warm-up pass fills the lazy caches.
ThroughputReport measure_throughput(Engine& engine,
                                    const std::map<std::string, std::vector<int>>& sequences);

}  // namespace eventcast
