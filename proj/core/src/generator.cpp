#include "eventcast/generator.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "eventcast/error.hpp"

namespace eventcast {

void GeneratorConfig::validate() const {
    if (total_events < 1) throw_config("total_events must be positive");
    if (num_cards < 1) throw_config("num_cards must be positive");
    if (fraud_fraction < 0.0 || fraud_fraction > 1.0)
        throw_config("fraud_fraction must lie in [0, 1]");
    if (genuine_fraction < 0.0 || genuine_fraction > 1.0)
        throw_config("genuine_fraction must lie in [0, 1]");
    if (fraud_fraction + genuine_fraction >= 1.0)
        throw_config("fraud and genuine fractions must leave room for background traffic");
    if (fraud_seq_len < 2) throw_config("fraud_seq_len must be at least 2");
    if (fraud_increment_min < 0.0 || fraud_increment_max < fraud_increment_min)
        throw_config("bad fraud increment range");
    if (genuine_increment_min < 0.0 || genuine_increment_max < genuine_increment_min)
        throw_config("bad genuine increment range");
}

GeneratedDataset generate_fraud_dataset(const GeneratorConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> card_dist(0, cfg.num_cards - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> background(cfg.background_min, cfg.background_max);
    std::uniform_real_distribution<double> fraud_step(cfg.fraud_increment_min,
                                                      cfg.fraud_increment_max);
    std::uniform_real_distribution<double> genuine_step(cfg.genuine_increment_min,
                                                        cfg.genuine_increment_max);
    // interrupted uniformly at random before the eighth transaction
    std::uniform_int_distribution<int> genuine_len(2, cfg.fraud_seq_len - 1);

    // Start probabilities per idle draw so that the expected event shares hit
    // the requested fractions: a fraud run emits seq_len events, a genuine
    // run the mean interrupted length, a background draw exactly one.
    const double mean_genuine =
        (2.0 + static_cast<double>(cfg.fraud_seq_len - 1)) / 2.0;
    const double f = cfg.fraud_fraction;
    const double g = cfg.genuine_fraction;
    const double draws_per_event =
        1.0 / ((1.0 - f - g) + f / cfg.fraud_seq_len + g / mean_genuine);
    const double p_fraud = f * draws_per_event / cfg.fraud_seq_len;
    const double p_genuine = g * draws_per_event / mean_genuine;

    struct CardState {
        int run_remaining = 0;
        bool run_is_fraud = false;
        double last_amount = 0.0;
        bool has_last = false;
    };
    std::vector<CardState> cards(static_cast<size_t>(cfg.num_cards));

    GeneratedDataset out;
    out.events.reserve(static_cast<size_t>(cfg.total_events));
    for (std::int64_t i = 1; i <= cfg.total_events; ++i) {
        const int card = card_dist(rng);
        CardState& state = cards[static_cast<size_t>(card)];

        double amount;
        if (state.run_remaining > 0) {
            amount = state.last_amount +
                     (state.run_is_fraud ? fraud_step(rng) : genuine_step(rng));
            --state.run_remaining;
            if (state.run_remaining == 0) {
                out.truth.push_back({"card" + std::to_string(card), i,
                                     state.run_is_fraud ? "fraud" : "genuine"});
            }
        } else {
            const double u = unit(rng);
            if (u < p_fraud) {
                state.run_is_fraud = true;
                state.run_remaining = cfg.fraud_seq_len - 1;  // this event starts the run
                amount = background(rng);
            } else if (u < p_fraud + p_genuine) {
                state.run_is_fraud = false;
                state.run_remaining = genuine_len(rng) - 1;
                amount = background(rng);
            } else {
                amount = background(rng);
            }
        }
        state.last_amount = amount;
        state.has_last = true;

        Event e;
        e.timestamp = i;
        e.partition = "card" + std::to_string(card);
        e.attributes["amount"] = amount;
        out.events.push_back(std::move(e));
    }
    return out;
}

std::string ground_truth_to_csv(const std::vector<GroundTruthEntry>& truth) {
    std::string out = "partition,matchEndIndex,kind\n";
    for (const auto& entry : truth) {
        out += entry.partition + "," + std::to_string(entry.match_end_index) + "," + entry.kind +
               "\n";
    }
    return out;
}

void write_ground_truth_csv(const std::string& path, const std::vector<GroundTruthEntry>& truth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write '" + path + "'");
    out << ground_truth_to_csv(truth);
}

std::vector<GroundTruthEntry> read_ground_truth_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw_io("ground-truth CSV is empty");
    std::vector<GroundTruthEntry> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        GroundTruthEntry entry;
        std::string index;
        if (!std::getline(row, entry.partition, ',') || !std::getline(row, index, ',') ||
            !std::getline(row, entry.kind))
            throw_io("bad ground-truth row: " + line);
        entry.match_end_index = std::stoll(index);
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace eventcast
