#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eventcast/event.hpp"

namespace eventcast {

/// Synthetic credit-card transaction stream: background traffic plus two
/// kinds of planted increasing-amount runs. Fraudulent runs are always
/// eight transactions long with every step up by at least the fraud
/// increment; legitimate look-alikes grow by any non-negative step and are
/// cut off at random before the eighth transaction.
struct GeneratorConfig {
    std::int64_t total_events = 100000;
    int num_cards = 100;
    double fraud_fraction = 0.2;    // share of events inside fraudulent runs
    double genuine_fraction = 0.2;  // share of events inside interrupted runs
    int fraud_seq_len = 8;
    double fraud_increment_min = 100.0;
    double fraud_increment_max = 300.0;
    double genuine_increment_min = 0.0;
    double genuine_increment_max = 200.0;
    double background_min = 1.0;
    double background_max = 500.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct GroundTruthEntry {
    std::string partition;
    std::int64_t match_end_index = 0;  // 1-based global stream index of the run's last event
    std::string kind;                  // "fraud" or "genuine"
};

struct GeneratedDataset {
    std::vector<Event> events;
    std::vector<GroundTruthEntry> truth;
};

GeneratedDataset generate_fraud_dataset(const GeneratorConfig& cfg);

std::string ground_truth_to_csv(const std::vector<GroundTruthEntry>& truth);
void write_ground_truth_csv(const std::string& path, const std::vector<GroundTruthEntry>& truth);
std::vector<GroundTruthEntry> read_ground_truth_csv(const std::string& path);

}  // namespace eventcast
