#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "eventcast/generator.hpp"
#include "eventcast/model_io.hpp"
#include "eventcast/streams.hpp"

using namespace eventcast;

namespace {

Event dated(std::int64_t ts, const std::string& partition, double amount) {
    Event e;
    e.timestamp = ts;
    e.partition = partition;
    e.attributes["amount"] = amount;
    return e;
}

}  // namespace

TEST_CASE("amount differences are derived per partition") {
    std::vector<Event> stream = {dated(1, "c1", 10), dated(2, "c1", 50)};
    const auto enriched = enrich_amount_diff(stream);
    CHECK(enriched[0].number("amountDiff") == 0.0);
    CHECK(enriched[1].number("amountDiff") == 40.0);

    // interleaved cards keep isolated histories
    std::vector<Event> mixed = {dated(1, "c1", 10), dated(2, "c2", 100), dated(3, "c1", 30),
                                dated(4, "c2", 70)};
    const auto result = enrich_amount_diff(mixed);
    CHECK(result[2].number("amountDiff") == 20.0);
    CHECK(result[3].number("amountDiff") == -30.0);
}

TEST_CASE("fixed-interval resampling interpolates numeric attributes") {
    std::vector<Event> stream;
    Event e1 = dated(0, "v1", 0);
    e1.attributes["x"] = 0.0;
    e1.attributes["status"] = std::string("sailing");
    Event e2 = dated(120, "v1", 0);
    e2.attributes["x"] = 2.0;
    e2.attributes["status"] = std::string("moored");
    stream = {e1, e2};

    const auto resampled = resample_fixed_interval(stream, 60, 3600);
    REQUIRE(resampled.size() == 3);
    CHECK(resampled[0].timestamp == 0);
    CHECK(resampled[0].number("x") == 0.0);  // endpoint preserved exactly
    CHECK(resampled[1].timestamp == 60);
    CHECK(resampled[1].number("x") == doctest::Approx(1.0));
    CHECK(resampled[1].text("status") == "sailing");  // categorical carries forward
    CHECK(resampled[2].timestamp == 120);
    CHECK(resampled[2].number("x") == 2.0);
}

TEST_CASE("gaps beyond the maximum break the segment") {
    std::vector<Event> stream;
    Event a = dated(0, "v1", 0);
    a.attributes["x"] = 0.0;
    Event b = dated(24 * 3600, "v1", 0);
    b.attributes["x"] = 100.0;
    stream = {a, b};
    const auto resampled = resample_fixed_interval(stream, 60, 3600);
    // no synthetic points across the day-long silence
    REQUIRE(resampled.size() == 2);
    CHECK(resampled[0].timestamp == 0);
    CHECK(resampled[1].timestamp == 24 * 3600);
}

TEST_CASE("already-regular streams pass through unchanged") {
    std::vector<Event> stream;
    for (int i = 0; i < 5; ++i) {
        Event e = dated(i * 60, "v1", 0);
        e.attributes["x"] = 10.0 * i;
        stream.push_back(e);
    }
    const auto resampled = resample_fixed_interval(stream, 60, 3600);
    REQUIRE(resampled.size() == stream.size());
    for (size_t i = 0; i < stream.size(); ++i) {
        CHECK(resampled[i].timestamp == stream[i].timestamp);
        CHECK(resampled[i].number("x") == doctest::Approx(stream[i].number("x")));
    }
    // timestamps are monotone per partition
    for (size_t i = 1; i < resampled.size(); ++i)
        CHECK(resampled[i].timestamp >= resampled[i - 1].timestamp);
}

TEST_CASE("event CSV round-trips values exactly") {
    std::mt19937_64 rng(101);
    std::vector<Event> events;
    for (int i = 0; i < 200; ++i) {
        Event e = dated(i + 1, "card" + std::to_string(rng() % 3),
                        std::uniform_real_distribution<double>(0, 500)(rng));
        if (i % 7 == 0) e.attributes["note"] = std::string("has,comma \"quoted\"");
        events.push_back(e);
    }
    const std::string csv = event_csv_to_string(events, {"amount", "note"});
    const auto parsed = parse_event_csv(csv);
    CHECK(parsed.rejected_parse == 0);
    REQUIRE(parsed.events.size() == events.size());
    for (size_t i = 0; i < events.size(); ++i) {
        CHECK(parsed.events[i].timestamp == events[i].timestamp);
        CHECK(parsed.events[i].partition == events[i].partition);
        CHECK(parsed.events[i].number("amount") == events[i].number("amount"));
        if (events[i].has("note")) CHECK(parsed.events[i].text("note") == events[i].text("note"));
    }
}

TEST_CASE("malformed and out-of-order rows are counted and dropped") {
    const std::string csv =
        "timestamp,partition,amount\n"
        "1,c1,10\n"
        "2,c1\n"            // short row
        "oops,c1,10\n"      // bad timestamp
        "5,c1,20\n"
        "3,c1,30\n"         // timestamp regression within c1
        "4,c2,40\n";        // fine: different partition
    const auto parsed = parse_event_csv(csv);
    CHECK(parsed.rejected_parse == 2);
    CHECK(parsed.rejected_order == 1);
    REQUIRE(parsed.events.size() == 3);
    CHECK(parsed.events[2].partition == "c2");
}

TEST_CASE("symbolization splits per partition and counts skips") {
    const MintermSet ms = build_minterms({parse_predicate("amount > 50")}, {});
    std::vector<Event> stream = {dated(1, "c1", 100), dated(2, "c2", 10), dated(3, "c1", 20)};
    const auto symbols = symbolize(stream, ms);
    REQUIRE(symbols.partitions.size() == 2);
    CHECK(symbols.sequences[0] == std::vector<int>{0, 1});
    CHECK(symbols.sequences[1] == std::vector<int>{1});
    CHECK(symbols.global_index[0] == std::vector<std::int64_t>{1, 3});
    CHECK(symbols.skipped == 0);
}

TEST_CASE("generated datasets are deterministic per seed") {
    GeneratorConfig cfg;
    cfg.total_events = 2000;
    cfg.num_cards = 5;
    cfg.seed = 7;
    const auto first = generate_fraud_dataset(cfg);
    const auto second = generate_fraud_dataset(cfg);
    REQUIRE(first.events.size() == second.events.size());
    CHECK(event_csv_to_string(first.events, {"amount"}) ==
          event_csv_to_string(second.events, {"amount"}));
    CHECK(ground_truth_to_csv(first.truth) == ground_truth_to_csv(second.truth));

    cfg.seed = 8;
    const auto third = generate_fraud_dataset(cfg);
    CHECK(event_csv_to_string(first.events, {"amount"}) !=
          event_csv_to_string(third.events, {"amount"}));
}

TEST_CASE("generated fraud share approximates the configured fraction") {
    GeneratorConfig cfg;
    cfg.total_events = 50000;
    cfg.num_cards = 20;
    cfg.fraud_fraction = 0.2;
    cfg.seed = 11;
    const auto dataset = generate_fraud_dataset(cfg);
    std::int64_t fraud_runs = 0;
    for (const auto& entry : dataset.truth)
        if (entry.kind == "fraud") ++fraud_runs;
    const double fraud_events =
        static_cast<double>(fraud_runs * cfg.fraud_seq_len) / cfg.total_events;
    CHECK(fraud_events > 0.15);
    CHECK(fraud_events < 0.25);
}

TEST_CASE("every planted fraud run is matched by the pattern automaton") {
    GeneratorConfig cfg;
    cfg.total_events = 8000;
    cfg.num_cards = 4;
    cfg.seed = 13;
    const auto dataset = generate_fraud_dataset(cfg);

    PatternConfig pattern;
    pattern.pattern =
        "(amountDiff > 0) ; (amountDiff > 0) ; (amountDiff > 0) ; (amountDiff > 0) ; "
        "(amountDiff > 0) ; (amountDiff > 0) ; (amountDiff > 0)";
    const auto compiled = compile_pattern(pattern);

    const auto enriched = enrich_amount_diff(dataset.events);
    const auto result = recognize(compiled.dsfa, enriched, compiled.minterms);

    std::set<std::pair<std::string, std::int64_t>> matched(result.matches_global.begin(),
                                                           result.matches_global.end());
    int fraud_runs = 0;
    for (const auto& entry : dataset.truth) {
        if (entry.kind != "fraud") continue;
        ++fraud_runs;
        CHECK(matched.count({entry.partition, entry.match_end_index}) == 1);
    }
    CHECK(fraud_runs > 0);

    // seven consecutive positive differences inside each fraud run
    std::map<std::string, std::vector<double>> diffs;
    std::map<std::string, std::vector<std::int64_t>> global_of;
    for (size_t i = 0; i < enriched.size(); ++i) {
        diffs[enriched[i].partition].push_back(enriched[i].number("amountDiff"));
        global_of[enriched[i].partition].push_back(static_cast<std::int64_t>(i) + 1);
    }
    for (const auto& entry : dataset.truth) {
        if (entry.kind != "fraud") continue;
        const auto& indices = global_of[entry.partition];
        const auto& values = diffs[entry.partition];
        const auto it = std::find(indices.begin(), indices.end(), entry.match_end_index);
        REQUIRE(it != indices.end());
        const auto pos = static_cast<size_t>(it - indices.begin());
        REQUIRE(pos >= 6);
        for (size_t back = 0; back < 7; ++back) CHECK(values[pos - back] > 100.0);
    }
}
