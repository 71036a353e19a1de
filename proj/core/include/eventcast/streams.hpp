#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eventcast/algebra.hpp"

namespace eventcast {

/// CSV ingestion: `timestamp,partition,<attr1>,<attr2>,...` with a header
/// row, comma separator and RFC-4180 quoting. Numeric-looking fields become
/// numbers, everything else stays categorical. Rows that fail to parse or
/// that break per-partition timestamp monotonicity are counted and dropped.
struct StreamReadResult {
    std::vector<Event> events;
    std::vector<std::string> attribute_columns;  // header order
    std::int64_t rejected_parse = 0;
    std::int64_t rejected_order = 0;
};

StreamReadResult read_event_csv(const std::string& path, const std::string& timestamp_column = "timestamp",
                                const std::string& partition_column = "partition");
StreamReadResult parse_event_csv(const std::string& text, const std::string& timestamp_column = "timestamp",
                                 const std::string& partition_column = "partition");

/// Columns written: timestamp, partition, then `attribute_columns` (attrs
/// missing on an event are left empty).
void write_event_csv(const std::string& path, const std::vector<Event>& events,
                     const std::vector<std::string>& attribute_columns);
std::string event_csv_to_string(const std::vector<Event>& events,
                                const std::vector<std::string>& attribute_columns);

/// Adds the difference between the amount of the current and the previous
/// transaction of the same partition; the first transaction of a partition
/// gets 0.
std::vector<Event> enrich_amount_diff(std::vector<Event> events,
                                      const std::string& amount_attribute = "amount",
                                      const std::string& diff_attribute = "amountDiff");

/// Linear interpolation onto a fixed-interval grid anchored at each
/// partition segment's first event. Numeric attributes interpolate,
/// categorical ones carry forward. Gaps above max_gap break the segment:
/// nothing is synthesized across them.
std::vector<Event> resample_fixed_interval(const std::vector<Event>& events,
                                           std::int64_t interval = 60,
                                           std::int64_t max_gap = 3600);

/// Per-partition symbol sequences in stream order plus the number of events
/// skipped by classification.
struct SymbolizedStream {
    std::vector<std::string> partitions;                 // insertion order
    std::vector<std::vector<int>> sequences;             // aligned with partitions
    std::vector<std::vector<std::int64_t>> global_index; // global 1-based per symbol
    std::int64_t skipped = 0;

    std::map<std::string, std::vector<int>> as_map() const;
};

SymbolizedStream symbolize(const std::vector<Event>& events, const MintermSet& minterms);

}  // namespace eventcast
