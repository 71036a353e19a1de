#include "eventcast/streams.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eventcast/error.hpp"

namespace eventcast {

namespace {

// RFC-4180 field splitting for one record; no embedded newlines
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string quote_csv_field(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_number(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::ostringstream os;
        os << static_cast<long long>(v);
        return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

StreamReadResult parse_event_csv(const std::string& text, const std::string& timestamp_column,
                                 const std::string& partition_column) {
    StreamReadResult result;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw_io("event CSV is empty");
    const auto header = split_csv_row(line);

    int ts_col = -1, part_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == timestamp_column) ts_col = static_cast<int>(i);
        else if (header[i] == partition_column) part_col = static_cast<int>(i);
        else result.attribute_columns.push_back(header[i]);
    }
    if (ts_col < 0) throw_io("event CSV misses the '" + timestamp_column + "' column");
    if (part_col < 0) throw_io("event CSV misses the '" + partition_column + "' column");

    std::map<std::string, std::int64_t> last_timestamp;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != header.size()) {
            ++result.rejected_parse;
            continue;
        }
        double ts_value = 0.0;
        if (!parse_number(fields[static_cast<size_t>(ts_col)], ts_value)) {
            ++result.rejected_parse;
            continue;
        }
        Event e;
        e.timestamp = static_cast<std::int64_t>(ts_value);
        e.partition = fields[static_cast<size_t>(part_col)];

        auto it = last_timestamp.find(e.partition);
        if (it != last_timestamp.end() && e.timestamp < it->second) {
            ++result.rejected_order;
            continue;
        }
        last_timestamp[e.partition] = e.timestamp;

        for (size_t i = 0; i < header.size(); ++i) {
            if (static_cast<int>(i) == ts_col || static_cast<int>(i) == part_col) continue;
            const std::string& raw = fields[i];
            if (raw.empty()) continue;
            double value = 0.0;
            if (parse_number(raw, value)) e.attributes[header[i]] = value;
            else e.attributes[header[i]] = raw;
        }
        result.events.push_back(std::move(e));
    }
    return result;
}

StreamReadResult read_event_csv(const std::string& path, const std::string& timestamp_column,
                                const std::string& partition_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_event_csv(buffer.str(), timestamp_column, partition_column);
}

std::string event_csv_to_string(const std::vector<Event>& events,
                                const std::vector<std::string>& attribute_columns) {
    std::string out = "timestamp,partition";
    for (const auto& col : attribute_columns) out += "," + quote_csv_field(col);
    out += "\n";
    for (const Event& e : events) {
        out += std::to_string(e.timestamp);
        out += ",";
        out += quote_csv_field(e.partition);
        for (const auto& col : attribute_columns) {
            out += ",";
            auto it = e.attributes.find(col);
            if (it == e.attributes.end()) continue;
            if (const double* d = std::get_if<double>(&it->second)) out += format_number(*d);
            else out += quote_csv_field(std::get<std::string>(it->second));
        }
        out += "\n";
    }
    return out;
}

void write_event_csv(const std::string& path, const std::vector<Event>& events,
                     const std::vector<std::string>& attribute_columns) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write '" + path + "'");
    out << event_csv_to_string(events, attribute_columns);
}

std::vector<Event> enrich_amount_diff(std::vector<Event> events, const std::string& amount_attribute,
                                      const std::string& diff_attribute) {
    std::map<std::string, double> previous;
    for (Event& e : events) {
        const double amount = e.number(amount_attribute);
        auto it = previous.find(e.partition);
        e.attributes[diff_attribute] = it == previous.end() ? 0.0 : amount - it->second;
        previous[e.partition] = amount;
    }
    return events;
}

std::vector<Event> resample_fixed_interval(const std::vector<Event>& events, std::int64_t interval,
                                           std::int64_t max_gap) {
    if (interval < 1) throw_config("resampling interval must be positive");

    // keep stream order within partitions
    std::map<std::string, std::vector<const Event*>> per_partition;
    std::vector<std::string> order;
    for (const Event& e : events) {
        auto [it, inserted] = per_partition.try_emplace(e.partition);
        if (inserted) order.push_back(e.partition);
        it->second.push_back(&e);
    }

    std::vector<Event> out;
    for (const auto& partition : order) {
        const auto& src = per_partition[partition];
        size_t segment_start = 0;
        while (segment_start < src.size()) {
            size_t segment_end = segment_start;
            while (segment_end + 1 < src.size() &&
                   src[segment_end + 1]->timestamp - src[segment_end]->timestamp <= max_gap) {
                ++segment_end;
            }
            const std::int64_t t0 = src[segment_start]->timestamp;
            const std::int64_t t1 = src[segment_end]->timestamp;
            size_t cursor = segment_start;
            for (std::int64_t t = t0; t <= t1; t += interval) {
                while (cursor < segment_end && src[cursor + 1]->timestamp <= t) ++cursor;
                const Event* lo = src[cursor];
                const Event* hi = cursor < segment_end ? src[cursor + 1] : src[cursor];
                Event e;
                e.timestamp = t;
                e.partition = partition;
                const double span = static_cast<double>(hi->timestamp - lo->timestamp);
                const double frac = span > 0.0 ? static_cast<double>(t - lo->timestamp) / span : 0.0;
                for (const auto& [name, value] : lo->attributes) {
                    if (const double* d = std::get_if<double>(&value)) {
                        double v = *d;
                        auto hit = hi->attributes.find(name);
                        if (hit != hi->attributes.end()) {
                            if (const double* dh = std::get_if<double>(&hit->second))
                                v = *d + frac * (*dh - *d);
                        }
                        e.attributes[name] = v;
                    } else {
                        e.attributes[name] = value;  // categorical carries forward
                    }
                }
                out.push_back(std::move(e));
            }
            segment_start = segment_end + 1;
        }
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    return out;
}

std::map<std::string, std::vector<int>> SymbolizedStream::as_map() const {
    std::map<std::string, std::vector<int>> out;
    for (size_t i = 0; i < partitions.size(); ++i) out[partitions[i]] = sequences[i];
    return out;
}

SymbolizedStream symbolize(const std::vector<Event>& events, const MintermSet& minterms) {
    SymbolizedStream out;
    std::map<std::string, size_t> index;
    std::int64_t global = 0;
    for (const Event& e : events) {
        ++global;
        const auto symbol = minterms.classify(e);
        if (!symbol) {
            ++out.skipped;
            continue;
        }
        auto [it, inserted] = index.try_emplace(e.partition, out.partitions.size());
        if (inserted) {
            out.partitions.push_back(e.partition);
            out.sequences.emplace_back();
            out.global_index.emplace_back();
        }
        out.sequences[it->second].push_back(*symbol);
        out.global_index[it->second].push_back(global);
    }
    return out;
}

}  // namespace eventcast
