#include "eventcast/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace eventcast {

std::vector<std::int64_t> regression_checkpoint_positions(
    const std::vector<std::int64_t>& matches, std::int64_t d) {
    if (d < 1) throw_config("checkpoint distance d must be >= 1");
    std::vector<std::int64_t> out;
    for (size_t i = 0; i < matches.size(); ++i) {
        const std::int64_t position = matches[i] - d;
        if (position < 1) continue;
        if (i > 0 && matches[i] - matches[i - 1] < d) continue;
        out.push_back(position);
    }
    return out;
}

double rmse(const std::vector<double>& forecasts, const std::vector<double>& actuals) {
    if (forecasts.empty() || forecasts.size() != actuals.size())
        throw_config("rmse needs matching non-empty forecast/actual lists");
    double sum = 0.0;
    for (size_t i = 0; i < forecasts.size(); ++i) {
        const double err = forecasts[i] - actuals[i];
        sum += err * err;
    }
    return std::sqrt(sum / static_cast<double>(forecasts.size()));
}

double mae(const std::vector<double>& forecasts, const std::vector<double>& actuals) {
    if (forecasts.empty() || forecasts.size() != actuals.size())
        throw_config("mae needs matching non-empty forecast/actual lists");
    double sum = 0.0;
    for (size_t i = 0; i < forecasts.size(); ++i) sum += std::abs(forecasts[i] - actuals[i]);
    return sum / static_cast<double>(forecasts.size());
}

double nois(double lower, double upper, double y, double a) {
    double score = upper - lower;
    if (y < lower) {
        if (a == 0.0) return std::numeric_limits<double>::infinity();
        score += 2.0 / a * (lower - y);
    } else if (y > upper) {
        if (a == 0.0) return std::numeric_limits<double>::infinity();
        score += 2.0 / a * (y - upper);
    }
    return score;
}

double anois(const std::vector<double>& scores) {
    if (scores.empty()) throw_config("anois needs at least one interval score");
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

StateDistances state_expected_distance(const Dsfa& dsfa) {
    // BFS over reversed transitions from the final states
    std::vector<int> steps(static_cast<size_t>(dsfa.num_states), -1);
    std::deque<int> queue;
    for (int q = 0; q < dsfa.num_states; ++q) {
        if (dsfa.is_final(q)) {
            steps[static_cast<size_t>(q)] = 0;
            queue.push_back(q);
        }
    }
    if (queue.empty()) throw_config("automaton has no final state");

    std::vector<std::vector<int>> reverse(static_cast<size_t>(dsfa.num_states));
    for (int q = 0; q < dsfa.num_states; ++q) {
        for (int s = 0; s < dsfa.num_symbols; ++s)
            reverse[static_cast<size_t>(dsfa.next(q, s))].push_back(q);
    }
    while (!queue.empty()) {
        const int q = queue.front();
        queue.pop_front();
        for (int p : reverse[static_cast<size_t>(q)]) {
            if (steps[static_cast<size_t>(p)] < 0) {
                steps[static_cast<size_t>(p)] = steps[static_cast<size_t>(q)] + 1;
                queue.push_back(p);
            }
        }
    }

    StateDistances out;
    out.fraction.assign(static_cast<size_t>(dsfa.num_states), 0.0);
    out.reachable.assign(static_cast<size_t>(dsfa.num_states), 0);
    for (int q = 0; q < dsfa.num_states; ++q) {
        if (steps[static_cast<size_t>(q)] >= 0) {
            out.reachable[static_cast<size_t>(q)] = 1;
            out.max_steps = std::max(out.max_steps, steps[static_cast<size_t>(q)]);
        } else {
            ++out.excluded;
        }
    }
    if (!out.reachable[static_cast<size_t>(dsfa.start)])
        throw_config("no final state is reachable from the start state");
    const double denom = out.max_steps > 0 ? static_cast<double>(out.max_steps) : 1.0;
    for (int q = 0; q < dsfa.num_states; ++q) {
        if (out.reachable[static_cast<size_t>(q)])
            out.fraction[static_cast<size_t>(q)] = steps[static_cast<size_t>(q)] / denom;
    }
    return out;
}

std::vector<double> default_theta_grid(int points) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
        out.push_back(static_cast<double>(i) / static_cast<double>(points - 1));
    return out;
}

ClassificationReport score_classification(const std::vector<std::pair<double, bool>>& scored,
                                          const std::vector<double>& thetas) {
    ClassificationReport report;
    report.checkpoints = static_cast<std::int64_t>(scored.size());
    for (const auto& [score, label] : scored) {
        (void)score;
        if (label) ++report.positives;
    }
    if (scored.empty()) return report;  // empty-report marker
    report.valid = true;

    for (double theta : thetas) {
        RocPoint pt;
        pt.theta = theta;
        for (const auto& [score, label] : scored) {
            const bool positive = score >= theta;
            if (positive && label) ++pt.tp;
            else if (positive && !label) ++pt.fp;
            else if (!positive && !label) ++pt.tn;
            else ++pt.fn;
        }
        pt.precision = (pt.tp + pt.fp) > 0 ? static_cast<double>(pt.tp) / (pt.tp + pt.fp) : 0.0;
        pt.recall = (pt.tp + pt.fn) > 0 ? static_cast<double>(pt.tp) / (pt.tp + pt.fn) : 0.0;
        pt.specificity = (pt.tn + pt.fp) > 0 ? static_cast<double>(pt.tn) / (pt.tn + pt.fp) : 0.0;
        report.roc.push_back(pt);
    }

    // trapezoid over (1 - specificity, recall), padded with the two corners
    std::vector<std::pair<double, double>> curve;
    curve.emplace_back(0.0, 0.0);
    curve.emplace_back(1.0, 1.0);
    for (const auto& pt : report.roc) curve.emplace_back(1.0 - pt.specificity, pt.recall);
    std::sort(curve.begin(), curve.end());
    double auc = 0.0;
    for (size_t i = 1; i < curve.size(); ++i) {
        auc += (curve[i].first - curve[i - 1].first) * (curve[i].second + curve[i - 1].second) / 2.0;
    }
    report.auc = auc;
    return report;
}

double auc_pairwise(const std::vector<std::pair<double, bool>>& scored) {
    std::int64_t pairs = 0;
    double favorable = 0.0;
    for (const auto& [sp, lp] : scored) {
        if (!lp) continue;
        for (const auto& [sn, ln] : scored) {
            if (ln) continue;
            ++pairs;
            if (sp > sn) favorable += 1.0;
            else if (sp == sn) favorable += 0.5;
        }
    }
    if (pairs == 0) throw_config("pairwise AUC needs both positive and negative labels");
    return favorable / static_cast<double>(pairs);
}

namespace {

// positions of matches within the next w events, per position
std::vector<char> lookahead_labels(const std::vector<std::int64_t>& matches, std::int64_t length,
                                   int w) {
    std::vector<char> labels(static_cast<size_t>(length) + 1, 0);
    for (std::int64_t k : matches) {
        for (std::int64_t i = std::max<std::int64_t>(1, k - w); i < k; ++i)
            labels[static_cast<size_t>(i)] = 1;
    }
    return labels;
}

}  // namespace

ClassificationReport classification_run(Engine& engine,
                                        const std::map<std::string, std::vector<int>>& sequences,
                                        double distance_lo, double distance_hi, int w,
                                        const std::vector<double>& thetas) {
    const StateDistances distances = state_expected_distance(engine.dsfa());
    engine.reset_runs();

    std::vector<std::pair<double, bool>> scored;
    for (const auto& [partition, symbols] : sequences) {
        const auto matches = recognize_symbols(engine.dsfa(), symbols);
        const auto labels = lookahead_labels(matches, static_cast<std::int64_t>(symbols.size()), w);
        for (size_t i = 0; i < symbols.size(); ++i) {
            const auto result = engine.step(partition, symbols[i]);
            if (!result.has_score) continue;
            if (!distances.in_range(result.dsfa_state, distance_lo, distance_hi)) continue;
            const std::int64_t position = static_cast<std::int64_t>(i) + 1;
            scored.emplace_back(result.score, labels[static_cast<size_t>(position)] != 0);
        }
    }
    return score_classification(scored, thetas);
}

RegressionReport regression_run(Engine& engine,
                                const std::map<std::string, std::vector<int>>& sequences,
                                std::int64_t d, double theta_fc) {
    engine.reset_runs();
    RegressionReport report;
    std::vector<double> points, actuals, interval_scores;
    const double a = 1.0 - theta_fc;

    for (const auto& [partition, symbols] : sequences) {
        const auto matches = recognize_symbols(engine.dsfa(), symbols);
        const auto positions = regression_checkpoint_positions(matches, d);
        size_t next_checkpoint = 0;
        for (size_t i = 0; i < symbols.size(); ++i) {
            const auto result = engine.step(partition, symbols[i]);
            const std::int64_t position = static_cast<std::int64_t>(i) + 1;
            if (next_checkpoint >= positions.size()) break;
            if (position != positions[next_checkpoint]) continue;
            ++next_checkpoint;
            ++report.checkpoints;

            if (engine.mode() == EngineMode::MeanBaseline) {
                if (!result.forecast || result.forecast->kind == ForecastKind::None) {
                    ++report.no_forecast;
                    continue;
                }
                points.push_back(static_cast<double>(result.forecast->point));
                actuals.push_back(static_cast<double>(d));
                interval_scores.push_back(nois(result.forecast->point, result.forecast->point,
                                               static_cast<double>(d), a));
                continue;
            }

            const auto wtd = engine.current_wtd(partition);
            if (!wtd) {
                ++report.no_forecast;
                continue;
            }
            const Forecast point = argmax_forecast(*wtd);
            points.push_back(static_cast<double>(point.point));
            actuals.push_back(static_cast<double>(d));
            const Forecast interval = interval_forecast(*wtd, theta_fc);
            if (interval.kind == ForecastKind::None) {
                ++report.no_forecast;
            } else {
                interval_scores.push_back(
                    nois(interval.start, interval.end, static_cast<double>(d), a));
            }
        }
    }

    if (points.empty()) return report;
    report.valid = true;
    report.rmse = rmse(points, actuals);
    report.mae = mae(points, actuals);
    report.anois = interval_scores.empty() ? 0.0 : anois(interval_scores);
    return report;
}

ThroughputReport measure_throughput(Engine& engine,
                                    const std::map<std::string, std::vector<int>>& sequences) {
    ThroughputReport report;
    for (const auto& [partition, symbols] : sequences)
        report.events += static_cast<std::int64_t>(symbols.size());
    if (report.events == 0) return report;  // marked invalid

    // warm-up pass: fills lazy forecast caches, excluded from timing
    engine.reset_runs();
    for (const auto& [partition, symbols] : sequences) {
        for (int s : symbols) engine.step(partition, s);
    }

    engine.reset_runs();
    const auto start = std::chrono::steady_clock::now();
    for (const auto& [partition, symbols] : sequences) {
        for (int s : symbols) {
            const auto result = engine.step(partition, s);
            (void)result;
        }
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.valid = true;
    report.events_per_second =
        report.seconds > 0.0 ? static_cast<double>(report.events) / report.seconds
                             : std::numeric_limits<double>::infinity();
    return report;
}

}  // namespace eventcast
